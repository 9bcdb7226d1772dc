// Microbenchmarks for the hot paths: graph classification and enumeration,
// the combinatorial counts, one self-energy evaluation, the jump-process
// sampler, the discrete Wigner transform, and the raw counter RNG.

#include <benchmark/benchmark.h>

#include <complex>
#include <vector>

#include "qdiff/classification.hpp"
#include "qdiff/kinetic.hpp"
#include "qdiff/partitions.hpp"
#include "qdiff/permutation.hpp"
#include "qdiff/radial_profile.hpp"
#include "qdiff/rng.hpp"
#include "qdiff/schedule.hpp"
#include "qdiff/self_energy.hpp"
#include "qdiff/splitstep.hpp"
#include "qdiff/tower_matrix.hpp"
#include "qdiff/wavefunction.hpp"
#include "qdiff/wigner.hpp"

using namespace qdiff;

static void BM_ClassifyExample(benchmark::State& state) {
    const Permutation sigma({1, 2, 7, 6, 5, 3, 4, 8});
    for (auto _ : state) {
        benchmark::DoNotOptimize(classify(sigma));
    }
}
BENCHMARK(BM_ClassifyExample);

static void BM_ScheduleExample(benchmark::State& state) {
    const Permutation sigma({1, 2, 7, 6, 5, 3, 4, 8});
    for (auto _ : state) {
        benchmark::DoNotOptimize(schedule(sigma));
    }
}
BENCHMARK(BM_ScheduleExample);

static void BM_ClassifyAll(benchmark::State& state) {
    const int k = static_cast<int>(state.range(0));
    for (auto _ : state) {
        uint64_t degsum = 0;
        for_each_permutation(k, [&](const Permutation& s) {
            degsum += static_cast<uint64_t>(classify(s).degree);
        });
        benchmark::DoNotOptimize(degsum);
    }
    state.SetItemsProcessed(state.iterations() *
                            static_cast<int64_t>(factorial(k)));
}
BENCHMARK(BM_ClassifyAll)->Arg(5)->Arg(6);

static void BM_TowerMatrixInverseCheck(benchmark::State& state) {
    const Permutation sigma({1, 2, 7, 6, 5, 3, 4, 8});
    for (auto _ : state) {
        const TowerMatrix M = tower_matrix(sigma);
        const TowerMatrix Mi = tower_matrix(sigma.inverse());
        benchmark::DoNotOptimize(M.multiply(Mi).is_identity());
    }
}
BENCHMARK(BM_TowerMatrixInverseCheck);

static void BM_Ursell(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(ursell(n, UrsellMode::Lattice));
    }
}
BENCHMARK(BM_Ursell)->Arg(4)->Arg(5);

static void BM_SelfEnergy(benchmark::State& state) {
    const RadialProfile prof = RadialProfile::gaussian();
    for (auto _ : state) {
        benchmark::DoNotOptimize(theta(1.0, 1e-3, prof, 3));
    }
}
BENCHMARK(BM_SelfEnergy);

static void BM_SigmaMoments(benchmark::State& state) {
    const RadialProfile prof = RadialProfile::gaussian();
    for (auto _ : state) {
        benchmark::DoNotOptimize(sigma_moments(1.0, prof, 3));
    }
}
BENCHMARK(BM_SigmaMoments);

static void BM_JumpChain(benchmark::State& state) {
    const RadialProfile prof = RadialProfile::gaussian();
    uint64_t seed = 1;
    uint64_t jumps = 0;
    for (auto _ : state) {
        const Trajectory tr = sample_jump_chain(1.0, 10.0, seed++, prof, 3);
        jumps += tr.jump_times.size();
        benchmark::DoNotOptimize(tr.directions.size());
    }
    state.SetItemsProcessed(static_cast<int64_t>(jumps));
}
BENCHMARK(BM_JumpChain);

static void BM_Wigner1D(benchmark::State& state) {
    const int N = static_cast<int>(state.range(0));
    const WaveFunction psi = gaussian_packet(1, N, 0.15, 0.7);
    for (auto _ : state) {
        benchmark::DoNotOptimize(wigner(psi, 1.0));
    }
}
BENCHMARK(BM_Wigner1D)->Arg(256)->Arg(512);

static void BM_SplitStep(benchmark::State& state) {
    const int N = 256;
    const double L = 25.6;
    const WaveFunction psi0 = gaussian_packet(1, N, L / N, 1.0);
    const PoissonPotential V = sample_poisson_potential(1, L, 7);
    for (auto _ : state) {
        benchmark::DoNotOptimize(evolve_splitstep(psi0, V, 0.5, 0.2, 0.02));
    }
    state.SetItemsProcessed(state.iterations() * 10);  // steps per evolve
}
BENCHMARK(BM_SplitStep);

static void BM_PhiloxBlock(benchmark::State& state) {
    Philox4x32::ctr_t ctr{0, 0, 0, 0};
    const Philox4x32::key_t key{42, 0};
    uint32_t acc = 0;
    for (auto _ : state) {
        const auto out = Philox4x32::block(ctr, key);
        acc ^= out[0] ^ out[1] ^ out[2] ^ out[3];
        ++ctr[0];
    }
    benchmark::DoNotOptimize(acc);
    state.SetBytesProcessed(state.iterations() * 16);
}
BENCHMARK(BM_PhiloxBlock);

BENCHMARK_MAIN();
