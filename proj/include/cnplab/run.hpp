#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cnplab/coeffs.hpp"
#include "cnplab/config.hpp"
#include "cnplab/model.hpp"
#include "cnplab/report.hpp"

namespace cnp {

/// Prerequisite of a suite, or "" for none.
std::string suite_prerequisite(const std::string& suite);

/// Runs the configured suites in dependency order. Module errors are caught
/// per suite; dependents of a suite that did not pass are skipped.
VerificationReport run(const RunConfig& cfg);

/// Deterministic points in the ball of the given radius (seeded
/// mt19937_64 with a fixed bit-to-double mapping).
std::vector<std::vector<Complex>> sample_points(std::uint64_t seed, int count, std::size_t d,
                                                double radius = 0.8);

/// Text table of n, a_n, b_n with a CNP verdict and radius estimates.
std::string kernel_info_text(const KernelSpec& spec, int N);

/// One row per N; throws PreconditionError when m < 2.
std::vector<CounterexampleRow> counterexample_cmd(int m, const std::vector<int>& Ns,
                                                  std::size_t d, const TruncationParams& p);
std::string counterexample_text(const std::vector<CounterexampleRow>& rows);

/// UTC time as YYYY-MM-DDTHH:MM:SSZ.
std::string utc_timestamp();

}  // namespace cnp
