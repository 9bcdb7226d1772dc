#pragma once

#include <array>
#include <cmath>
#include <cstdint>

#include "qdiff/vec.hpp"

namespace qdiff {

// Philox 4x32-10 counter-based generator.
//
// A counter-based generator is a pure function (counter, key) -> 4 x uint32.
// Reproducibility across any number of worker threads follows by deriving
// the key from (master seed, stream id) and walking the counter locally;
// no state is shared and no sequence splitting heuristics are needed.
struct Philox4x32 {
    static constexpr uint32_t kMul0 = 0xD2511F53u;
    static constexpr uint32_t kMul1 = 0xCD9E8D57u;
    static constexpr uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr uint32_t kWeyl1 = 0xBB67AE85u;

    using ctr_t = std::array<uint32_t, 4>;
    using key_t = std::array<uint32_t, 2>;

    static inline void round_once(ctr_t& x, const key_t& k) {
        const uint64_t p0 = static_cast<uint64_t>(kMul0) * x[0];
        const uint64_t p1 = static_cast<uint64_t>(kMul1) * x[2];
        const uint32_t hi0 = static_cast<uint32_t>(p0 >> 32);
        const uint32_t lo0 = static_cast<uint32_t>(p0);
        const uint32_t hi1 = static_cast<uint32_t>(p1 >> 32);
        const uint32_t lo1 = static_cast<uint32_t>(p1);
        x = {hi1 ^ x[1] ^ k[0], lo1, hi0 ^ x[3] ^ k[1], lo0};
    }

    // Ten rounds with the Weyl key schedule between rounds.
    static ctr_t block(ctr_t ctr, key_t key) {
        for (int r = 0; r < 10; ++r) {
            if (r > 0) {
                key[0] += kWeyl0;
                key[1] += kWeyl1;
            }
            round_once(ctr, key);
        }
        return ctr;
    }
};

// A stream of random numbers: one (seed, stream id) pair, private counter.
class RngStream {
public:
    RngStream(uint64_t seed, uint64_t stream)
        : key_{static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32)},
          stream_lo_(static_cast<uint32_t>(stream)),
          stream_hi_(static_cast<uint32_t>(stream >> 32)) {}

    uint32_t next_u32() {
        if (pos_ == 4) refill();
        return buf_[pos_++];
    }

    uint64_t next_u64() {
        const uint64_t lo = next_u32();
        const uint64_t hi = next_u32();
        return (hi << 32) | lo;
    }

    // Uniform in [0,1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform in (0,1]; safe to take logs of.
    double uniform_pos() { return 1.0 - uniform(); }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    double exponential(double rate) { return -std::log(uniform_pos()) / rate; }

    // Marsaglia polar method; one spare value cached.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double m = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * m;
        have_spare_ = true;
        return u * m;
    }

    // Uniform direction on the unit sphere S^{d-1}.
    Vec sphere(int d) {
        Vec u(d);
        if (d == 1) {
            u[0] = uniform() < 0.5 ? -1.0 : 1.0;
            return u;
        }
        double n2;
        do {
            n2 = 0;
            for (int i = 0; i < d; ++i) {
                u[i] = normal();
                n2 += u[i] * u[i];
            }
        } while (n2 == 0.0);
        u *= 1.0 / std::sqrt(n2);
        return u;
    }

    // Points inside the ball of radius R.
    Vec ball(int d, double R) {
        Vec u = sphere(d);
        const double r = R * std::pow(uniform(), 1.0 / d);
        return r * u;
    }

    uint64_t poisson(double mean);

private:
    void refill() {
        Philox4x32::ctr_t ctr = {static_cast<uint32_t>(counter_),
                                 static_cast<uint32_t>(counter_ >> 32), stream_lo_,
                                 stream_hi_};
        buf_ = Philox4x32::block(ctr, key_);
        ++counter_;
        pos_ = 0;
    }

    Philox4x32::key_t key_;
    uint32_t stream_lo_, stream_hi_;
    uint64_t counter_ = 0;
    Philox4x32::ctr_t buf_{};
    int pos_ = 4;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace qdiff
