#include "qnls/cli.hpp"

int main(int argc, char** argv) { return qnls::cli::run(argc, argv); }
