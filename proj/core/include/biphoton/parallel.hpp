#pragma once

#include <complex>
#include <cstddef>
#include <functional>

namespace biphoton {

// Worker count: hardware concurrency capped by BIPHOTON_THREADS when set.
unsigned worker_count();

// Runs body(i) for i in [0, n). Each index is visited exactly once; callers
// write into disjoint slots, so results do not depend on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

double pairwise_sum(const double* x, std::size_t n);
std::complex<double> pairwise_sum(const std::complex<double>* x, std::size_t n);

}  // namespace biphoton
