#include "euler/fft3.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>

namespace euler {
namespace {

std::mutex g_plan_mutex;

fftw_plan plan_for(int n, int sign) {
    static std::map<std::pair<int, int>, fftw_plan> cache;
    std::lock_guard<std::mutex> lock(g_plan_mutex);
    auto it = cache.find({n, sign});
    if (it != cache.end()) return it->second;
    // plan on a scratch buffer; execution later uses the new-array interface
    std::vector<std::complex<double>> scratch(static_cast<size_t>(n) * n * n);
    auto* p = reinterpret_cast<fftw_complex*>(scratch.data());
    fftw_plan plan = fftw_plan_dft_3d(n, n, n, p, p, sign, FFTW_ESTIMATE);
    if (!plan) throw std::runtime_error("fft3: plan creation failed");
    cache[{n, sign}] = plan;
    return plan;
}

void run(std::vector<std::complex<double>>& a, int n, int sign) {
    if (a.size() != static_cast<size_t>(n) * n * n)
        throw std::invalid_argument("fft3: size mismatch");
    fftw_plan plan = plan_for(n, sign);
    auto* p = reinterpret_cast<fftw_complex*>(a.data());
    fftw_execute_dft(plan, p, p);
}

}  // namespace

void dft3(std::vector<std::complex<double>>& a, int n) { run(a, n, FFTW_FORWARD); }
void idft3(std::vector<std::complex<double>>& a, int n) { run(a, n, FFTW_BACKWARD); }

}  // namespace euler
