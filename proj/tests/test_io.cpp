#include <cstdio>
#include <filesystem>
#include <fstream>
#include <doctest.h>

#include "aas/ensemble.hpp"
#include "aas/errors.hpp"
#include "aas/io.hpp"

using namespace aas;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const char* name) {
    return fs::temp_directory_path() / name;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::vector<ObservableRecord> sample_records(bool with_qfi) {
    std::vector<ObservableRecord> recs;
    for (int i = 0; i < 3; ++i) {
        ObservableRecord r;
        r.point = {144, -0.1, 1e-3 * (i + 1) / 3.0};
        r.n_samples = 7;
        r.zeta = {1.2345678901234567e-1 * (i + 1), 3.33e-5, 7};
        r.ipr = {0.25 / (i + 1), 1e-6, 7};
        r.gap = {2e-6 * (i + 1), 4.7e-9, 7};
        if (with_qfi) r.qfi = EnsembleStat{1e7 / (i + 1), 22.5, 7};
        recs.push_back(r);
    }
    return recs;
}

}  // namespace

TEST_CASE("sweep CSV round-trips doubles exactly") {
    for (bool with_qfi : {false, true}) {
        const auto path = temp_file("aas_io_test.csv");
        const auto recs = sample_records(with_qfi);
        write_sweep_csv(path, recs, with_qfi);
        const auto back = read_sweep_csv(path);
        REQUIRE(back.size() == recs.size());
        for (std::size_t i = 0; i < recs.size(); ++i) {
            CHECK(back[i].point.L == recs[i].point.L);
            CHECK(back[i].point.delta == recs[i].point.delta);
            CHECK(back[i].point.h == recs[i].point.h);
            CHECK(back[i].n_samples == recs[i].n_samples);
            CHECK(back[i].zeta.mean == recs[i].zeta.mean);
            CHECK(back[i].zeta.std_error == recs[i].zeta.std_error);
            CHECK(back[i].gap.mean == recs[i].gap.mean);
            CHECK(back[i].qfi.has_value() == with_qfi);
            if (with_qfi) CHECK(back[i].qfi->mean == recs[i].qfi->mean);
        }
        fs::remove(path);
    }
}

TEST_CASE("CSV uses LF endings and a fixed header") {
    const auto path = temp_file("aas_io_header.csv");
    write_sweep_csv(path, sample_records(false), false);
    const std::string text = slurp(path);
    CHECK(text.find('\r') == std::string::npos);
    CHECK(text.rfind("L,delta,h,phi_samples,zeta_mean,zeta_stderr,ipr_mean,ipr_stderr,"
                     "gap_mean,gap_stderr\n", 0) == 0);
    fs::remove(path);
}

TEST_CASE("schema violations are rejected") {
    const auto path = temp_file("aas_io_bad.csv");
    {
        std::ofstream out(path, std::ios::binary);
        out << "L,delta,h,bogus\n1,2,3,4\n";
    }
    CHECK_THROWS_AS(read_sweep_csv(path), ConfigError);
    {
        std::ofstream out(path, std::ios::binary);
        out << "L,delta,h,phi_samples,zeta_mean,zeta_stderr,ipr_mean,ipr_stderr,gap_mean,gap_stderr\n"
            << "144,0.0,0.001,5,0.1,0.0,0.2,0.0\n";  // short row
    }
    CHECK_THROWS_AS(read_sweep_csv(path), ConfigError);
    {
        std::ofstream out(path, std::ios::binary);
        out << "L,delta,h,phi_samples,zeta_mean,zeta_stderr,ipr_mean,ipr_stderr,gap_mean,gap_stderr\n"
            << "144,0.0,xyz,5,0.1,0.0,0.2,0.0,0.3,0.0\n";
    }
    CHECK_THROWS_AS(read_sweep_csv(path), ConfigError);
    CHECK_THROWS_AS(read_sweep_csv(temp_file("nonexistent_aas.csv")), IoError);
    fs::remove(path);
}

TEST_CASE("fidelity and qfi writers require their stats") {
    const auto path = temp_file("aas_io_fid.csv");
    auto recs = sample_records(false);
    CHECK_THROWS_AS(write_fidelity_csv(path, recs), IoError);
    for (auto& r : recs) r.fidelity = EnsembleStat{0.95, 0.001, 7};
    write_fidelity_csv(path, recs);
    const std::string text = slurp(path);
    CHECK(text.rfind("delta,h,fidelity_mean,fidelity_stderr,stark_dominated\n", 0) == 0);
    CHECK(text.find(",1\n") != std::string::npos);  // 0.95 >= 0.9 flag
    fs::remove(path);
}

TEST_CASE("sidecar metadata") {
    const auto out = temp_file("aas_sidecar_test.csv");
    nlohmann::json cfg;
    cfg["sizes"] = {21, 34};
    write_sidecar(out, "sweep", cfg, 20240817u);
    fs::path sidecar = out;
    sidecar += ".meta.json";
    const auto meta = read_json(sidecar);
    CHECK(meta.at("artifact_version") == kArtifactVersion);
    CHECK(meta.at("command") == "sweep");
    CHECK(meta.at("master_seed") == 20240817u);
    CHECK(meta.at("config") == cfg);
    fs::remove(sidecar);
}

TEST_CASE("format_double keeps 17 significant digits") {
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(1e-9) == "1.0000000000000001e-09");
}
