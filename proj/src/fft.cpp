#include "isosparse/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <stdexcept>

namespace isosparse {

namespace {

struct FftwFree {
    void operator()(void *p) const { fftw_free(p); }
};

template <class T>
std::unique_ptr<T[], FftwFree> fftw_buffer(std::size_t count) {
    auto *p = static_cast<T *>(fftw_malloc(sizeof(T) * std::max<std::size_t>(count, 1)));
    if (!p)
        throw std::bad_alloc();
    return std::unique_ptr<T[], FftwFree>(p);
}

} // namespace

struct RealFft::Plans {
    fftw_plan r2c = nullptr;
    fftw_plan c2r = nullptr;

    explicit Plans(std::size_t n) {
        auto real = fftw_buffer<double>(n);
        auto spec = fftw_buffer<fftw_complex>(n / 2 + 1);
        const int len = static_cast<int>(n);
        r2c = fftw_plan_dft_r2c_1d(len, real.get(), spec.get(), FFTW_ESTIMATE);
        c2r = fftw_plan_dft_c2r_1d(len, spec.get(), real.get(), FFTW_ESTIMATE);
        if (!r2c || !c2r)
            throw std::runtime_error("RealFft: FFTW planning failed");
    }
    ~Plans() {
        fftw_destroy_plan(r2c);
        fftw_destroy_plan(c2r);
    }
    Plans(const Plans &) = delete;
    Plans &operator=(const Plans &) = delete;
};

RealFft::RealFft(std::size_t n) : n_{n} {
    if (n == 0)
        throw std::invalid_argument("RealFft: length must be positive");
    plans_ = std::make_shared<const Plans>(n);
}

void RealFft::forward(std::span<const double> in, std::span<Complex> out) const {
    if (in.size() != n_ || out.size() != bins())
        throw std::invalid_argument("RealFft::forward: buffer size mismatch");
    auto real = fftw_buffer<double>(n_);
    auto spec = fftw_buffer<fftw_complex>(bins());
    std::copy(in.begin(), in.end(), real.get());
    fftw_execute_dft_r2c(plans_->r2c, real.get(), spec.get());
    for (std::size_t k = 0; k < bins(); ++k)
        out[k] = Complex(spec[k][0], spec[k][1]);
}

void RealFft::inverse(std::span<const Complex> in, std::span<double> out) const {
    if (in.size() != bins() || out.size() != n_)
        throw std::invalid_argument("RealFft::inverse: buffer size mismatch");
    auto real = fftw_buffer<double>(n_);
    auto spec = fftw_buffer<fftw_complex>(bins());
    for (std::size_t k = 0; k < bins(); ++k) {
        spec[k][0] = in[k].real();
        spec[k][1] = in[k].imag();
    }
    // c2r overwrites its input, which is our private copy.
    fftw_execute_dft_c2r(plans_->c2r, spec.get(), real.get());
    std::copy(real.get(), real.get() + n_, out.begin());
}

} // namespace isosparse
