#pragma once

#include <cstddef>
#include <memory>
#include <span>

#include "isosparse/types.hpp"

namespace isosparse {

/// Unnormalized real-to-complex FFT of a fixed length n, producing the n/2 + 1
/// nonnegative-frequency bins. The inverse returns n times the original signal.
/// Plans are shared between copies; each call works on its own buffers.
class RealFft {
public:
    explicit RealFft(std::size_t n);

    std::size_t size() const { return n_; }
    std::size_t bins() const { return n_ / 2 + 1; }

    void forward(std::span<const double> in, std::span<Complex> out) const;
    void inverse(std::span<const Complex> in, std::span<double> out) const;

private:
    struct Plans;
    std::size_t n_;
    std::shared_ptr<const Plans> plans_;
};

} // namespace isosparse
