#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "aas/ensemble.hpp"

namespace aas {

// Shortest representation that round-trips a double (17 significant digits).
std::string format_double(double v);

inline constexpr const char* kArtifactVersion = "1.0.0";

// Sweep CSV: header
//   L,delta,h,phi_samples,zeta_mean,zeta_stderr,ipr_mean,ipr_stderr,
//   gap_mean,gap_stderr[,qfi_mean,qfi_stderr]
// rows sorted by (L, delta, h), UTF-8, LF line endings.
void write_sweep_csv(const std::filesystem::path& path,
                     const std::vector<ObservableRecord>& records, bool with_qfi);

std::vector<ObservableRecord> read_sweep_csv(const std::filesystem::path& path);

// Fidelity map CSV: delta,h,fidelity_mean,fidelity_stderr,stark_dominated
// (the last column flags mean >= 0.9).
void write_fidelity_csv(const std::filesystem::path& path,
                        const std::vector<ObservableRecord>& records);

// Ground-state profile CSV: site,amplitude,probability.
void write_wavefunction_csv(const std::filesystem::path& path,
                            const std::vector<double>& amplitude);

// QFI scaling CSV: L,qfi_mean,qfi_stderr.
void write_qfi_csv(const std::filesystem::path& path,
                   const std::vector<ObservableRecord>& records);

void write_json(const std::filesystem::path& path, const nlohmann::json& doc);

nlohmann::json read_json(const std::filesystem::path& path);

// Sidecar metadata (config + master_seed + artifact version) for reproducing
// an output byte-exactly.
void write_sidecar(const std::filesystem::path& output_path, const std::string& command,
                   const nlohmann::json& config, std::uint64_t master_seed);

}  // namespace aas
