#include "qnls/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>
#include <vector>

namespace qnls::fft {

namespace {

std::mutex plan_mutex;

// FFTW's planner is not thread safe, execution with a finished plan is.
fftw_plan plan_for(int n, int sign)
{
    static std::map<std::pair<int, int>, fftw_plan> cache;
    std::lock_guard<std::mutex> lock(plan_mutex);
    auto key = std::make_pair(n, sign);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    std::vector<std::complex<double>> scratch(static_cast<std::size_t>(n));
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    fftw_plan p = fftw_plan_dft_1d(n, buf, buf, sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    cache.emplace(key, p);
    return p;
}

}  // namespace

void execute(std::complex<double>* data, int n, int sign)
{
    fftw_plan p = plan_for(n, sign);
    auto* buf = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(p, buf, buf);
}

std::string backend_version() { return fftw_version; }

}  // namespace qnls::fft
