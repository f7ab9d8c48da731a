#include "histcl/io.hpp"

#include <cerrno>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "histcl/error.hpp"

namespace histcl::io {

namespace {

using nlohmann::json;

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw data_error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

double parse_double(const std::string& s, const std::string& where) {
    try {
        std::size_t used = 0;
        double v = std::stod(s, &used);
        while (used < s.size() && std::isspace(static_cast<unsigned char>(s[used]))) ++used;
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw data_error("bad numeric field '" + s + "' in " + where);
    }
}

}  // namespace

MicroData read_micro_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw data_error("'" + path + "': empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();

    MicroData out;
    out.site_ids = split_csv_line(line);
    if (out.site_ids.empty()) throw data_error("'" + path + "': empty header");
    std::size_t K = out.site_ids.size();

    std::vector<double> values;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = split_csv_line(line);
        if (fields.size() != K)
            throw data_error("'" + path + "': row " + std::to_string(rows) + " has " +
                             std::to_string(fields.size()) + " fields, expected " + std::to_string(K));
        for (const auto& f : fields) {
            if (f.empty())
                throw data_error("'" + path + "': missing value at row " + std::to_string(rows));
            values.push_back(parse_double(f, path + " row " + std::to_string(rows)));
        }
        ++rows;
    }
    out.data.rows = rows;
    out.data.cols = K;
    out.data.values = std::move(values);
    return out;
}

void write_micro_csv(const std::string& path, const std::vector<std::string>& site_ids,
                     const Matrix& data) {
    if (site_ids.size() != data.cols) throw data_error("write_micro_csv: header/data mismatch");
    std::ostringstream out;
    out.precision(17);
    for (std::size_t k = 0; k < site_ids.size(); ++k) out << (k ? "," : "") << site_ids[k];
    out << '\n';
    for (std::size_t r = 0; r < data.rows; ++r) {
        for (std::size_t k = 0; k < data.cols; ++k) out << (k ? "," : "") << data(r, k);
        out << '\n';
    }
    atomic_write(path, out.str());
}

SiteLayout read_sites_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw data_error("'" + path + "': empty file");
    SiteLayout layout;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = split_csv_line(line);
        if (fields.size() != 3)
            throw data_error("'" + path + "': expected id,x,y at row " + std::to_string(row));
        Site s;
        s.id = fields[0];
        s.x = parse_double(fields[1], path);
        s.y = parse_double(fields[2], path);
        layout.sites.push_back(std::move(s));
        ++row;
    }
    layout.validate();
    return layout;
}

void write_sites_csv(const std::string& path, const SiteLayout& layout) {
    std::ostringstream out;
    out.precision(17);
    out << "id,x,y\n";
    for (const Site& s : layout.sites) out << s.id << ',' << s.x << ',' << s.y << '\n';
    atomic_write(path, out.str());
}

HistogramFile read_histogram_json(const std::string& path) {
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw data_error("'" + path + "': " + e.what());
    }
    try {
        HistogramFile out;
        auto breaks = j.at("breakpoints").get<std::vector<std::vector<double>>>();
        auto grid = std::make_shared<const BinGrid>(std::move(breaks));
        out.series.grid = grid;
        for (const auto& h : j.at("histograms")) {
            SparseHistogram hist;
            hist.grid = grid;
            auto span = h.at("span").get<std::vector<std::size_t>>();
            if (span.size() != 2) throw data_error("'" + path + "': span must be [lo, hi)");
            for (const auto& entry : h.at("counts")) {
                BinIndex bin = entry.at("bin").get<BinIndex>();
                hist.add(bin, entry.at("n").get<std::int64_t>());
            }
            out.series.histograms.push_back(std::move(hist));
            out.series.block_spans.emplace_back(span[0], span[1]);
        }
        if (j.contains("meta")) {
            const auto& meta = j["meta"];
            if (meta.contains("site_ids"))
                out.site_ids = meta["site_ids"].get<std::vector<std::string>>();
            if (meta.contains("bin_rule")) out.bin_rule = meta["bin_rule"].get<std::string>();
        }
        out.series.validate();
        return out;
    } catch (const json::exception& e) {
        throw data_error("'" + path + "': " + e.what());
    }
}

void write_histogram_json(const std::string& path, const HistogramSeries& series,
                          const std::vector<std::string>& site_ids, const std::string& bin_rule) {
    series.validate();
    json j;
    j["breakpoints"] = json::array();
    for (std::size_t k = 0; k < series.grid->dims(); ++k)
        j["breakpoints"].push_back(series.grid->breakpoints(k));
    j["histograms"] = json::array();
    for (std::size_t t = 0; t < series.size(); ++t) {
        json h;
        h["span"] = {series.block_spans[t].first, series.block_spans[t].second};
        h["counts"] = json::array();
        for (const auto& [bin, n] : series.histograms[t].counts)
            h["counts"].push_back({{"bin", bin}, {"n", n}});
        j["histograms"].push_back(std::move(h));
    }
    json meta;
    if (!site_ids.empty()) meta["site_ids"] = site_ids;
    if (!bin_rule.empty()) meta["bin_rule"] = bin_rule;
    if (!meta.empty()) j["meta"] = std::move(meta);
    atomic_write(path, j.dump(2) + "\n");
}

void write_fit_json(const std::string& path, const FitFile& fit) {
    const FitResult& r = fit.result;
    json j;
    j["model"] = "gaussian-max-stable";
    j["mode"] = fit.mode;
    j["order"] = fit.order;
    j["margin_model"] =
        r.theta_hat.margin_model == MarginModel::constant ? "constant" : "spatially_varying";
    j["parameters"] = {{"names", r.theta_hat.names()}, {"estimates", r.theta_hat.values}};
    j["loglik"] = r.loglik;
    j["iterations"] = r.iterations;
    j["converged"] = r.converged;
    j["floored_bins"] = r.floored_bins;
    if (!r.std_errors.empty()) j["std_errors"] = r.std_errors;
    if (!r.h_hat.empty()) j["H"] = r.h_hat;
    if (!r.j_hat.empty()) j["J"] = r.j_hat;
    if (!r.g_hat.empty()) j["G"] = r.g_hat;
    if (r.variance_T) j["variance_T"] = *r.variance_T;
    if (!fit.grid_bins.empty()) {
        j["grid"] = {{"bins_per_margin", fit.grid_bins}};
        if (!fit.bin_rule.empty()) j["grid"]["bin_rule"] = fit.bin_rule;
    }
    atomic_write(path, j.dump(2) + "\n");
}

FitFile read_fit_json(const std::string& path) {
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw data_error("'" + path + "': " + e.what());
    }
    try {
        FitFile out;
        out.order = j.value("order", 2);
        out.mode = j.value("mode", "symbolic");
        FitResult& r = out.result;
        r.theta_hat.margin_model = j.at("margin_model").get<std::string>() == "constant"
                                       ? MarginModel::constant
                                       : MarginModel::spatially_varying;
        r.theta_hat.values = j.at("parameters").at("estimates").get<std::vector<double>>();
        r.loglik = j.value("loglik", 0.0);
        r.iterations = j.value("iterations", 0);
        r.converged = j.value("converged", false);
        r.floored_bins = j.value("floored_bins", 0LL);
        if (j.contains("std_errors")) r.std_errors = j["std_errors"].get<std::vector<double>>();
        if (j.contains("H")) r.h_hat = j["H"].get<std::vector<double>>();
        if (j.contains("J")) r.j_hat = j["J"].get<std::vector<double>>();
        if (j.contains("G")) r.g_hat = j["G"].get<std::vector<double>>();
        if (j.contains("variance_T")) r.variance_T = j["variance_T"].get<std::size_t>();
        if (j.contains("grid")) {
            out.grid_bins = j["grid"].value("bins_per_margin", std::vector<std::size_t>{});
            out.bin_rule = j["grid"].value("bin_rule", std::string{});
        }
        return out;
    } catch (const json::exception& e) {
        throw data_error("'" + path + "': " + e.what());
    }
}

std::string fnv1a_digest(const std::string& path) {
    std::string content = read_file(path);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : content) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "fnv1a:%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void atomic_write(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw data_error("cannot write '" + tmp.string() + "'");
        out << content;
        out.flush();
        if (!out) throw data_error("write failed for '" + tmp.string() + "'");
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) throw data_error("cannot rename into '" + path + "': " + ec.message());
}

}  // namespace histcl::io
