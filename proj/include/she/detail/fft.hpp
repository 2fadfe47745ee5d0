#pragma once

#include <fftw3.h>

#include <cmath>
#include <cstddef>
#include <mutex>
#include <vector>

#include "she/errors.hpp"
#include "she/special_functions.hpp"

namespace she::detail {

// The FFTW planner is not reentrant.
inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

// Real <-> half-complex transform pair of fixed length, FFTW_ESTIMATE so plans never depend on timing.
class RealFft {
public:
    explicit RealFft(std::size_t n) : n_(n) {
        if (n < 2) throw InvalidArgument("RealFft: length must be >= 2");
        re_ = fftw_alloc_real(n);
        sp_ = fftw_alloc_complex(n / 2 + 1);
        if (!re_ || !sp_) throw Error("RealFft: allocation failed");
        std::lock_guard<std::mutex> lk(fftw_planner_mutex());
        fwd_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), re_, sp_, FFTW_ESTIMATE);
        bwd_ = fftw_plan_dft_c2r_1d(static_cast<int>(n), sp_, re_, FFTW_ESTIMATE);
    }
    RealFft(const RealFft&) = delete;
    RealFft& operator=(const RealFft&) = delete;
    ~RealFft() {
        {
            std::lock_guard<std::mutex> lk(fftw_planner_mutex());
            fftw_destroy_plan(fwd_);
            fftw_destroy_plan(bwd_);
        }
        fftw_free(re_);
        fftw_free(sp_);
    }

    std::size_t size() const { return n_; }
    std::size_t spectrum_size() const { return n_ / 2 + 1; }
    double* real() { return re_; }
    fftw_complex* spectrum() { return sp_; }
    void forward() { fftw_execute(fwd_); }
    // unnormalized: backward(forward(v)) = n v
    void backward() { fftw_execute(bwd_); }

    // Circular convolution of v with the centred Gaussian of standard deviation sigma, grid spacing dx.
    void gaussian_smooth(std::vector<double>& v, double dx, double sigma) {
        if (v.size() != n_) throw InvalidArgument("RealFft: length mismatch");
        if (!(sigma > 0.0)) return;
        std::copy(v.begin(), v.end(), re_);
        forward();
        const double dk = 2.0 * kPi / (dx * static_cast<double>(n_));
        const double inv = 1.0 / static_cast<double>(n_);
        for (std::size_t k = 0; k < spectrum_size(); ++k) {
            const double xi = dk * static_cast<double>(k);
            const double m = std::exp(-0.5 * sigma * sigma * xi * xi) * inv;
            sp_[k][0] *= m;
            sp_[k][1] *= m;
        }
        backward();
        std::copy(re_, re_ + n_, v.begin());
    }

private:
    std::size_t n_;
    double* re_ = nullptr;
    fftw_complex* sp_ = nullptr;
    fftw_plan fwd_ = nullptr, bwd_ = nullptr;
};

// DST-I on n interior nodes; applying it twice multiplies by 2(n+1).
class SineFft {
public:
    explicit SineFft(std::size_t n) : n_(n) {
        if (n < 1) throw InvalidArgument("SineFft: length must be >= 1");
        buf_ = fftw_alloc_real(n);
        if (!buf_) throw Error("SineFft: allocation failed");
        std::lock_guard<std::mutex> lk(fftw_planner_mutex());
        plan_ = fftw_plan_r2r_1d(static_cast<int>(n), buf_, buf_, FFTW_RODFT00, FFTW_ESTIMATE);
    }
    SineFft(const SineFft&) = delete;
    SineFft& operator=(const SineFft&) = delete;
    ~SineFft() {
        {
            std::lock_guard<std::mutex> lk(fftw_planner_mutex());
            fftw_destroy_plan(plan_);
        }
        fftw_free(buf_);
    }
    std::size_t size() const { return n_; }
    double* data() { return buf_; }
    void execute() { fftw_execute(plan_); }

private:
    std::size_t n_;
    double* buf_ = nullptr;
    fftw_plan plan_ = nullptr;
};

}  // namespace she::detail
