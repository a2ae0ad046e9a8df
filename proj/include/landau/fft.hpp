#pragma once

#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>

#include <fftw3.h>

namespace landau {

using cplx = std::complex<double>;

// Unnormalized 1-D complex transforms of a fixed length. Plans are shared per
// length and executed on caller buffers, so one plan serves every thread and
// the arithmetic never depends on how work was partitioned.
class Fft {
public:
    explicit Fft(std::size_t n) : n_(n), plans_(plans_for(n)) {}

    std::size_t size() const { return n_; }

    // out[p] = sum_m in[m] e^{-2 pi i p m / n}
    void forward(cplx* data) const { run(plans_->fwd, data); }
    // out[m] = sum_p in[p] e^{+2 pi i p m / n}
    void backward(cplx* data) const { run(plans_->bwd, data); }

private:
    struct Plans {
        fftw_plan fwd = nullptr, bwd = nullptr;
        ~Plans() {
            if (fwd) fftw_destroy_plan(fwd);
            if (bwd) fftw_destroy_plan(bwd);
        }
    };

    static void run(fftw_plan p, cplx* data) {
        auto* d = reinterpret_cast<fftw_complex*>(data);
        fftw_execute_dft(p, d, d);
    }

    static std::shared_ptr<Plans> plans_for(std::size_t n) {
        static std::mutex mu;
        static std::map<std::size_t, std::shared_ptr<Plans>> cache;
        std::lock_guard lk(mu);
        auto& slot = cache[n];
        if (!slot) {
            slot = std::make_shared<Plans>();
            auto* buf = fftw_alloc_complex(n);
            const int ni = static_cast<int>(n);
            const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
            slot->fwd = fftw_plan_dft_1d(ni, buf, buf, FFTW_FORWARD, flags);
            slot->bwd = fftw_plan_dft_1d(ni, buf, buf, FFTW_BACKWARD, flags);
            fftw_free(buf);
        }
        return slot;
    }

    std::size_t n_;
    std::shared_ptr<Plans> plans_;
};

} // namespace landau
