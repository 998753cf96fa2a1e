#include "aas/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "aas/errors.hpp"

namespace aas {

namespace {

std::ofstream open_output(const std::filesystem::path& path) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary);  // binary keeps LF endings everywhere
    if (!out) throw IoError("cannot open for writing: " + path.string());
    return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}

double parse_double(const std::string& s, const std::string& context) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("malformed number '" + s + "' in " + context);
    }
}

}  // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_sweep_csv(const std::filesystem::path& path,
                     const std::vector<ObservableRecord>& records, bool with_qfi) {
    auto out = open_output(path);
    out << "L,delta,h,phi_samples,zeta_mean,zeta_stderr,ipr_mean,ipr_stderr,gap_mean,gap_stderr";
    if (with_qfi) out << ",qfi_mean,qfi_stderr";
    out << "\n";
    for (const auto& r : records) {
        out << r.point.L << ',' << format_double(r.point.delta) << ','
            << format_double(r.point.h) << ',' << r.n_samples << ','
            << format_double(r.zeta.mean) << ',' << format_double(r.zeta.std_error) << ','
            << format_double(r.ipr.mean) << ',' << format_double(r.ipr.std_error) << ','
            << format_double(r.gap.mean) << ',' << format_double(r.gap.std_error);
        if (with_qfi) {
            if (!r.qfi) throw IoError("write_sweep_csv: record missing qfi stats");
            out << ',' << format_double(r.qfi->mean) << ',' << format_double(r.qfi->std_error);
        }
        out << '\n';
    }
    if (!out) throw IoError("failed writing " + path.string());
}

std::vector<ObservableRecord> read_sweep_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("empty CSV: " + path.string());

    const auto header = split_csv_line(line);
    const std::vector<std::string> base = {"L",        "delta",       "h",
                                           "phi_samples", "zeta_mean", "zeta_stderr",
                                           "ipr_mean", "ipr_stderr",  "gap_mean",
                                           "gap_stderr"};
    bool with_qfi = false;
    if (header.size() == base.size() + 2 && header[base.size()] == "qfi_mean" &&
        header[base.size() + 1] == "qfi_stderr") {
        with_qfi = true;
    } else if (header.size() != base.size()) {
        throw ConfigError("unexpected CSV header in " + path.string());
    }
    for (std::size_t i = 0; i < base.size(); ++i)
        if (header[i] != base[i])
            throw ConfigError("unexpected CSV column '" + header[i] + "' in " + path.string());

    std::vector<ObservableRecord> records;
    long lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        const std::string ctx = path.string() + ":" + std::to_string(lineno);
        if (f.size() != header.size())
            throw ConfigError("wrong field count in " + ctx);
        ObservableRecord r;
        r.point.L = static_cast<long>(parse_double(f[0], ctx));
        r.point.delta = parse_double(f[1], ctx);
        r.point.h = parse_double(f[2], ctx);
        r.n_samples = static_cast<long>(parse_double(f[3], ctx));
        r.zeta = {parse_double(f[4], ctx), parse_double(f[5], ctx), r.n_samples};
        r.ipr = {parse_double(f[6], ctx), parse_double(f[7], ctx), r.n_samples};
        r.gap = {parse_double(f[8], ctx), parse_double(f[9], ctx), r.n_samples};
        if (with_qfi)
            r.qfi = EnsembleStat{parse_double(f[10], ctx), parse_double(f[11], ctx), r.n_samples};
        records.push_back(r);
    }
    return records;
}

void write_fidelity_csv(const std::filesystem::path& path,
                        const std::vector<ObservableRecord>& records) {
    auto out = open_output(path);
    out << "delta,h,fidelity_mean,fidelity_stderr,stark_dominated\n";
    for (const auto& r : records) {
        if (!r.fidelity) throw IoError("write_fidelity_csv: record missing fidelity stats");
        out << format_double(r.point.delta) << ',' << format_double(r.point.h) << ','
            << format_double(r.fidelity->mean) << ',' << format_double(r.fidelity->std_error)
            << ',' << (r.fidelity->mean >= 0.9 ? 1 : 0) << '\n';
    }
    if (!out) throw IoError("failed writing " + path.string());
}

void write_wavefunction_csv(const std::filesystem::path& path,
                            const std::vector<double>& amplitude) {
    auto out = open_output(path);
    out << "site,amplitude,probability\n";
    for (std::size_t i = 0; i < amplitude.size(); ++i)
        out << i + 1 << ',' << format_double(amplitude[i]) << ','
            << format_double(amplitude[i] * amplitude[i]) << '\n';
    if (!out) throw IoError("failed writing " + path.string());
}

void write_qfi_csv(const std::filesystem::path& path,
                   const std::vector<ObservableRecord>& records) {
    auto out = open_output(path);
    out << "L,qfi_mean,qfi_stderr\n";
    for (const auto& r : records) {
        if (!r.qfi) throw IoError("write_qfi_csv: record missing qfi stats");
        out << r.point.L << ',' << format_double(r.qfi->mean) << ','
            << format_double(r.qfi->std_error) << '\n';
    }
    if (!out) throw IoError("failed writing " + path.string());
}

void write_json(const std::filesystem::path& path, const nlohmann::json& doc) {
    auto out = open_output(path);
    out << doc.dump(2) << '\n';
    if (!out) throw IoError("failed writing " + path.string());
}

nlohmann::json read_json(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path.string());
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("invalid JSON in " + path.string() + ": " + e.what());
    }
}

void write_sidecar(const std::filesystem::path& output_path, const std::string& command,
                   const nlohmann::json& config, std::uint64_t master_seed) {
    nlohmann::json meta;
    meta["artifact_version"] = kArtifactVersion;
    meta["command"] = command;
    meta["master_seed"] = master_seed;
    meta["config"] = config;
    std::filesystem::path sidecar = output_path;
    sidecar += ".meta.json";
    write_json(sidecar, meta);
}

}  // namespace aas
