// Command-line front end: simulate, aggregate, fit, variance, report, bench.
// Exit codes: 0 success, 2 usage error, 3 data error, 4 numerical failure.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "histcl/error.hpp"
#include "histcl/grid.hpp"
#include "histcl/histogram.hpp"
#include "histcl/inference.hpp"
#include "histcl/io.hpp"
#include "histcl/likelihood.hpp"
#include "histcl/parallel.hpp"
#include "histcl/simulate.hpp"
#include "histcl/version.hpp"

namespace {

using histcl::data_error;
using histcl::numeric_error;
using nlohmann::json;

class StageTimer {
public:
    StageTimer() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

// Every command writes one of these beside its first output. Re-running a
// command with the options recorded here reproduces the outputs.
struct Manifest {
    std::string command;
    json options = json::object();
    json inputs = json::object();
    std::vector<std::string> outputs;
    json timings = json::object();
    unsigned threads = 0;

    void add_input(const std::string& path) { inputs[path] = histcl::io::fnv1a_digest(path); }

    void write() const {
        if (outputs.empty()) return;
        json j;
        j["command"] = command;
        j["version"] = histcl::version;
        j["threads"] = threads == 0 ? histcl::parallel::max_threads() : threads;
        j["options"] = options;
        j["inputs"] = inputs;
        j["outputs"] = outputs;
        j["timings"] = timings;
        histcl::io::atomic_write(outputs.front() + ".manifest.json", j.dump(2) + "\n");
    }
};

std::vector<double> parse_csv_doubles(const std::string& s, std::size_t expect,
                                      const std::string& what) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string field;
    while (std::getline(ss, field, ',')) {
        try {
            out.push_back(std::stod(field));
        } catch (const std::exception&) {
            throw CLI::ValidationError(what, "bad numeric value '" + field + "'");
        }
    }
    if (expect != 0 && out.size() != expect)
        throw CLI::ValidationError(what, "expected " + std::to_string(expect) + " values");
    return out;
}

histcl::SmithParams make_params(const std::string& sigma_csv, const std::string& margins_csv,
                                const std::string& margins_varying_csv) {
    histcl::SmithParams p;
    auto s = parse_csv_doubles(sigma_csv, 3, "--sigma");
    p.s11 = s[0];
    p.s12 = s[1];
    p.s22 = s[2];
    if (!margins_varying_csv.empty()) {
        auto m = parse_csv_doubles(margins_varying_csv, 7, "--margins-varying");
        p.margins = histcl::SpatiallyVaryingMargins{m[0], m[1], m[2], m[3], m[4], m[5], m[6]};
    } else if (!margins_csv.empty()) {
        auto m = parse_csv_doubles(margins_csv, 3, "--margins");
        p.margins = histcl::ConstantMargins{m[0], m[1], m[2]};
    } else {
        p.margins = histcl::ConstantMargins{0.0, 1.0, 0.0};
    }
    p.validate();
    return p;
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
    std::size_t K = 2, N = 1;
    std::uint64_t seed = 0;
    std::string sigma, margins, margins_varying;
    std::vector<double> window{0, 40, 0, 40};
    double expansion = 4.0;
    std::string out_prefix = "sim";
};

void run_simulate(const SimulateArgs& a, Manifest& man) {
    histcl::SimConfig config;
    config.seed = a.seed;
    config.K = a.K;
    config.N = a.N;
    config.window = {a.window[0], a.window[1], a.window[2], a.window[3]};
    config.storm_window_expansion = a.expansion;
    config.params = make_params(a.sigma, a.margins, a.margins_varying);

    StageTimer timer;
    histcl::SiteLayout layout = histcl::sample_sites(config);
    histcl::Matrix data = histcl::simulate_smith(layout, config);
    man.timings["simulate_s"] = timer.seconds();

    std::string sites_path = a.out_prefix + "_sites.csv";
    std::string data_path = a.out_prefix + "_data.csv";
    std::string meta_path = a.out_prefix + "_meta.json";
    histcl::io::write_sites_csv(sites_path, layout);
    std::vector<std::string> ids;
    for (const auto& s : layout.sites) ids.push_back(s.id);
    histcl::io::write_micro_csv(data_path, ids, data);

    json meta;
    meta["seed"] = config.seed;
    meta["K"] = config.K;
    meta["N"] = config.N;
    meta["sigma"] = {config.params.s11, config.params.s12, config.params.s22};
    meta["window"] = config.window;
    meta["storm_window_expansion"] = config.storm_window_expansion;
    if (const auto* c = std::get_if<histcl::ConstantMargins>(&config.params.margins))
        meta["margins"] = {{"type", "constant"}, {"mu", c->mu}, {"sigma", c->sigma}, {"xi", c->xi}};
    else {
        const auto& v = std::get<histcl::SpatiallyVaryingMargins>(config.params.margins);
        meta["margins"] = {{"type", "spatially_varying"},
                           {"alpha", {v.a0, v.a1, v.a2}},
                           {"beta", {v.b0, v.b1, v.b2}},
                           {"xi", v.xi}};
    }
    histcl::io::atomic_write(meta_path, meta.dump(2) + "\n");

    man.outputs = {data_path, sites_path, meta_path};
    std::cout << "wrote " << data_path << " (" << a.N << "x" << a.K << "), " << sites_path << ", "
              << meta_path << "\n";
}

// ---------------------------------------------------------------- aggregate

struct AggregateArgs {
    std::string input;
    std::string bins;       // scalar or per-margin list
    std::string breaks_json;
    std::size_t T = 1;
    bool detrend = false;
    std::size_t block_len = 0;
    bool clamp = false;
    std::string output = "hist.json";
};

void run_aggregate(const AggregateArgs& a, Manifest& man) {
    man.add_input(a.input);
    histcl::io::MicroData micro = histcl::io::read_micro_csv(a.input);
    if (micro.data.rows == 0) throw data_error("'" + a.input + "': no data rows");

    StageTimer timer;
    if (a.detrend) {
        std::vector<double> col(micro.data.rows);
        for (std::size_t k = 0; k < micro.data.cols; ++k) {
            for (std::size_t r = 0; r < micro.data.rows; ++r) col[r] = micro.data(r, k);
            auto res = histcl::detrend(col);
            for (std::size_t r = 0; r < micro.data.rows; ++r) micro.data(r, k) = res[r];
        }
    }
    if (a.block_len > 1) micro.data = histcl::block_maxima(micro.data, a.block_len);

    std::shared_ptr<const histcl::BinGrid> grid;
    std::string bin_rule;
    if (!a.breaks_json.empty()) {
        man.add_input(a.breaks_json);
        auto file = histcl::io::read_histogram_json(a.breaks_json);
        grid = file.series.grid;
        bin_rule = "explicit breakpoints from " + a.breaks_json;
    } else {
        std::vector<std::size_t> bins;
        for (double v : parse_csv_doubles(a.bins.empty() ? "25" : a.bins, 0, "--bins")) {
            if (v < 1) throw CLI::ValidationError("--bins", "bin counts must be >= 1");
            bins.push_back(static_cast<std::size_t>(v));
        }
        if (bins.size() == 1) bins.assign(micro.data.cols, bins[0]);
        grid = std::make_shared<const histcl::BinGrid>(
            histcl::make_grid(micro.data, bins));
        bin_rule = "equal-width over [min-delta, max] per margin";
    }

    histcl::AggregateOptions opts;
    opts.clamp = a.clamp;
    histcl::HistogramSeries series = histcl::aggregate(micro.data, grid, a.T, opts);
    man.timings["aggregate_s"] = timer.seconds();

    histcl::io::write_histogram_json(a.output, series, micro.site_ids, bin_rule);
    man.outputs = {a.output};
    std::cout << "wrote " << a.output << " (T=" << series.size() << ", N=" << series.total()
              << ")\n";
}

// ---------------------------------------------------------------- fit

struct FitArgs {
    std::string hist_json;
    std::string classic_csv;
    std::string sites_csv;
    int order = 2;
    std::string margin_model = "constant";
    std::string init;
    double tol = 1e-8;
    int max_iter = 5000;
    std::string output = "fit.json";
};

histcl::MarginModel parse_margin_model(const std::string& s) {
    if (s == "constant") return histcl::MarginModel::constant;
    if (s == "varying" || s == "spatially_varying") return histcl::MarginModel::spatially_varying;
    throw CLI::ValidationError("--margins-model", "must be 'constant' or 'varying'");
}

void run_fit(const FitArgs& a, Manifest& man) {
    if (a.hist_json.empty() == a.classic_csv.empty())
        throw CLI::ValidationError("fit",
                                   "provide exactly one of a histogram JSON or --classic micro CSV");
    man.add_input(a.sites_csv);
    histcl::SiteLayout layout = histcl::io::read_sites_csv(a.sites_csv);
    histcl::MarginModel model = parse_margin_model(a.margin_model);

    histcl::CompositeConfig config;
    config.order = a.order;

    histcl::FitOptions fit_opts;
    fit_opts.tol = a.tol;
    fit_opts.max_iter = a.max_iter;

    histcl::ParamVector theta0;
    histcl::LogLikFn objective;
    std::optional<histcl::SymbolicObjective> sym;
    std::optional<histcl::ClassicObjective> cls;
    std::vector<std::size_t> grid_bins;
    std::string bin_rule;

    if (!a.hist_json.empty()) {
        man.add_input(a.hist_json);
        auto file = histcl::io::read_histogram_json(a.hist_json);
        for (std::size_t k = 0; k < file.series.grid->dims(); ++k)
            grid_bins.push_back(file.series.grid->bins(k));
        bin_rule = file.bin_rule;
        // the estimator is T-invariant for shared bins, so optimize on the
        // merged histogram
        histcl::HistogramSeries merged;
        merged.grid = file.series.grid;
        merged.histograms = {histcl::merge(file.series)};
        merged.block_spans = {{0, static_cast<std::size_t>(file.series.total())}};
        theta0 = histcl::initial_guess(merged, layout, model);
        sym.emplace(merged, layout, config);
        objective = [&](const histcl::ParamVector& t) { return sym->value(t.to_smith()); };
    } else {
        man.add_input(a.classic_csv);
        auto micro = histcl::io::read_micro_csv(a.classic_csv);
        theta0 = histcl::initial_guess_micro(micro.data, layout, model);
        cls.emplace(std::move(micro.data), layout, config);
        objective = [&](const histcl::ParamVector& t) { return cls->value(t.to_smith()); };
    }
    if (!a.init.empty()) {
        theta0.values = parse_csv_doubles(a.init, histcl::param_count(model), "--init");
    }

    StageTimer timer;
    histcl::FitResult result = histcl::fit(objective, theta0, fit_opts);
    man.timings["optimize_s"] = timer.seconds();

    histcl::io::FitFile file;
    file.result = std::move(result);
    file.order = a.order;
    file.mode = a.hist_json.empty() ? "classic" : "symbolic";
    file.grid_bins = std::move(grid_bins);
    file.bin_rule = std::move(bin_rule);
    histcl::io::write_fit_json(a.output, file);
    man.outputs = {a.output};

    std::cout << "wrote " << a.output << " (loglik=" << file.result.loglik
              << ", converged=" << (file.result.converged ? "yes" : "no")
              << ", iterations=" << file.result.iterations << ")\n";
    if (file.result.floored_bins > 0)
        std::cerr << "warning: probability floor active in " << file.result.floored_bins
                  << " bin terms\n";
}

// ---------------------------------------------------------------- variance

struct VarianceArgs {
    std::string fit_json;
    std::string sites_csv;
    std::string hist_json;
    std::string data_csv;
    std::size_t T = 0;  // 0: keep the histogram file's T
    std::string output;
};

void run_variance(const VarianceArgs& a, Manifest& man) {
    man.add_input(a.fit_json);
    man.add_input(a.sites_csv);
    histcl::io::FitFile fit = histcl::io::read_fit_json(a.fit_json);
    histcl::SiteLayout layout = histcl::io::read_sites_csv(a.sites_csv);
    const histcl::ParamVector& at = fit.result.theta_hat;

    histcl::CompositeConfig config;
    config.order = fit.order;

    StageTimer timer;
    std::vector<double> H, J;
    std::size_t T_used = 0;
    double block_size = 1.0;
    if (fit.mode == "classic") {
        if (a.data_csv.empty()) throw data_error("variance: classic fit needs --data");
        man.add_input(a.data_csv);
        auto micro = histcl::io::read_micro_csv(a.data_csv);
        histcl::ClassicObjective obj(std::move(micro.data), layout, config);
        H = histcl::h_hat(obj, at);
        J = histcl::j_hat_classic(obj, at);
        T_used = obj.row_count();
    } else {
        if (a.hist_json.empty()) throw data_error("variance: symbolic fit needs --hist");
        man.add_input(a.hist_json);
        auto file = histcl::io::read_histogram_json(a.hist_json);
        histcl::HistogramSeries series = std::move(file.series);
        if (!a.data_csv.empty() && a.T > 0) {
            man.add_input(a.data_csv);
            auto micro = histcl::io::read_micro_csv(a.data_csv);
            series = histcl::aggregate(micro.data, series.grid, a.T);
        } else if (a.T > 0 && a.T != series.size()) {
            throw data_error("variance: changing T requires --data to re-aggregate");
        }
        histcl::SymbolicObjective obj(series, layout, config);
        H = histcl::h_hat(obj, at);
        J = histcl::j_hat(obj, at);
        T_used = series.size();
        block_size = std::max(
            1.0, static_cast<double>(series.total()) / static_cast<double>(series.size()));
    }
    histcl::GodambeResult g = histcl::godambe_blocked(H, J, at.size(), block_size);
    man.timings["variance_s"] = timer.seconds();

    fit.result.h_hat = std::move(H);
    fit.result.j_hat = std::move(J);
    fit.result.g_hat = std::move(g.g_hat);
    fit.result.std_errors = std::move(g.std_errors);
    fit.result.variance_T = T_used;

    std::string out = a.output.empty() ? a.fit_json : a.output;
    histcl::io::write_fit_json(out, fit);
    man.outputs = {out};

    std::cout << "wrote " << out << " (T=" << T_used << "); std errors:";
    auto names = fit.result.theta_hat.names();
    for (std::size_t i = 0; i < names.size(); ++i)
        std::cout << " " << names[i] << "=" << fit.result.std_errors[i];
    std::cout << "\n";
}

// ---------------------------------------------------------------- report

struct ReportArgs {
    std::string mode;  // return-levels | qq | terms | summary
    std::string fit_json, sites_csv, data_csv, hist_json;
    double years = 95.0, blocks_per_year = 6.0;
    long long N = 0, K = 0, B = 0;
    int order = 2;
    std::vector<std::string> fit_files;
    std::string output = "report.csv";
};

histcl::MarginSpec margins_of(const histcl::io::FitFile& fit) {
    return fit.result.theta_hat.to_smith().margins;
}

void run_report(const ReportArgs& a, Manifest& man) {
    std::ostringstream csv;
    csv.precision(12);
    if (a.mode == "return-levels") {
        man.add_input(a.fit_json);
        man.add_input(a.sites_csv);
        auto fit = histcl::io::read_fit_json(a.fit_json);
        auto layout = histcl::io::read_sites_csv(a.sites_csv);
        auto margins = margins_of(fit);
        csv << "site,x,y,mu,sigma,xi,return_level\n";
        for (std::size_t k = 0; k < layout.size(); ++k) {
            histcl::GevParams g = histcl::margin_at(k, margins, layout);
            double rl = histcl::return_level(g, a.years, a.blocks_per_year);
            csv << layout[k].id << ',' << layout[k].x << ',' << layout[k].y << ',' << g.mu << ','
                << g.sigma << ',' << g.xi << ',' << rl << '\n';
        }
    } else if (a.mode == "qq") {
        man.add_input(a.fit_json);
        man.add_input(a.sites_csv);
        man.add_input(a.data_csv);
        auto fit = histcl::io::read_fit_json(a.fit_json);
        auto layout = histcl::io::read_sites_csv(a.sites_csv);
        auto micro = histcl::io::read_micro_csv(a.data_csv);
        if (micro.data.cols != layout.size())
            throw data_error("report qq: data/sites dimension mismatch");
        auto margins = margins_of(fit);
        csv << "site,p,empirical,theoretical\n";
        std::vector<double> col(micro.data.rows);
        for (std::size_t k = 0; k < layout.size(); ++k) {
            for (std::size_t r = 0; r < micro.data.rows; ++r) col[r] = micro.data(r, k);
            auto pairs = histcl::gev_qq(col, histcl::margin_at(k, margins, layout));
            for (std::size_t r = 0; r < pairs.size(); ++r)
                csv << layout[k].id << ',' << (static_cast<double>(r) + 0.5) / pairs.size() << ','
                    << pairs[r].first << ',' << pairs[r].second << '\n';
        }
    } else if (a.mode == "terms") {
        std::optional<long long> B;
        if (a.B > 0) B = a.B;
        histcl::TermCounts counts;
        if (!a.hist_json.empty()) {
            man.add_input(a.hist_json);
            auto file = histcl::io::read_histogram_json(a.hist_json);
            long long N = a.N > 0 ? a.N : file.series.total();
            long long K = static_cast<long long>(file.series.grid->dims());
            if (!B) B = static_cast<long long>(file.series.grid->bins(0));
            counts = histcl::count_terms(N, K, a.order, B, &file.series);
            csv << "N,K,j,B,classic,symbolic_max,symbolic_actual\n";
            csv << N << ',' << K << ',' << a.order << ',' << *B << ',' << counts.classic << ','
                << counts.symbolic_max << ',' << *counts.symbolic_actual << '\n';
        } else {
            if (a.N <= 0 || a.K <= 0)
                throw data_error("report terms: need --N and --K (or --hist)");
            counts = histcl::count_terms(a.N, a.K, a.order, B);
            csv << "N,K,j,B,classic,symbolic_max\n";
            csv << a.N << ',' << a.K << ',' << a.order << ',' << (B ? *B : 0) << ','
                << counts.classic << ',' << counts.symbolic_max << '\n';
        }
    } else if (a.mode == "summary") {
        if (a.fit_files.empty()) throw data_error("report summary: no fit files given");
        std::vector<histcl::io::FitFile> fits;
        for (const auto& f : a.fit_files) {
            man.add_input(f);
            fits.push_back(histcl::io::read_fit_json(f));
        }
        auto names = fits[0].result.theta_hat.names();
        std::size_t p = names.size();
        for (const auto& f : fits)
            if (f.result.theta_hat.values.size() != p)
                throw data_error("report summary: fits have mixed parameterizations");
        csv << "parameter,mean,sd,n\n";
        double n = static_cast<double>(fits.size());
        for (std::size_t i = 0; i < p; ++i) {
            double mean = 0.0, sq = 0.0;
            for (const auto& f : fits) mean += f.result.theta_hat.values[i] / n;
            for (const auto& f : fits) {
                double d = f.result.theta_hat.values[i] - mean;
                sq += d * d;
            }
            double sd = n > 1 ? std::sqrt(sq / (n - 1.0)) : 0.0;
            csv << names[i] << ',' << mean << ',' << sd << ',' << fits.size() << '\n';
        }
    } else {
        throw CLI::ValidationError("report", "unknown mode '" + a.mode + "'");
    }

    histcl::io::atomic_write(a.output, csv.str());
    man.outputs = {a.output};
    std::cout << "wrote " << a.output << "\n";
}

// ---------------------------------------------------------------- bench

struct BenchArgs {
    std::vector<std::size_t> N_list{1000};
    std::size_t K = 10;
    std::size_t bins = 25;
    std::string sigma = "300,150,200";
    std::uint64_t seed = 1;
    bool with_classic = false;
    int classic_cap = 100;  // iteration cap; measured classic time is a lower bound
    std::string output = "bench.csv";
};

void run_bench(const BenchArgs& a, Manifest& man) {
    std::ostringstream csv;
    csv << "N,K,B,t_hist,t_s,t_c\n";
    for (std::size_t N : a.N_list) {
        histcl::SimConfig config;
        config.seed = a.seed;
        config.K = a.K;
        config.N = N;
        config.params = make_params(a.sigma, "", "");
        histcl::SiteLayout layout = histcl::sample_sites(config);
        histcl::Matrix data = histcl::simulate_smith(layout, config);

        StageTimer t_hist;
        auto grid = std::make_shared<const histcl::BinGrid>(histcl::make_grid(data, a.bins));
        histcl::HistogramSeries series = histcl::aggregate(data, grid, 1);
        double hist_s = t_hist.seconds();

        histcl::CompositeConfig cfg;
        cfg.order = 2;
        histcl::ParamVector theta0 = histcl::initial_guess(series, layout, histcl::MarginModel::constant);

        StageTimer t_sym;
        histcl::SymbolicObjective sym(series, layout, cfg);
        histcl::FitResult fr = histcl::fit(
            [&](const histcl::ParamVector& t) { return sym.value(t.to_smith()); }, theta0);
        double sym_s = t_sym.seconds();

        double cls_s = std::nan("");
        if (a.with_classic) {
            histcl::FitOptions opts;
            opts.max_iter = a.classic_cap;
            StageTimer t_cls;
            histcl::ClassicObjective cls(data, layout, cfg);
            histcl::fit([&](const histcl::ParamVector& t) { return cls.value(t.to_smith()); },
                        theta0, opts);
            cls_s = t_cls.seconds();
        }
        csv << N << ',' << a.K << ',' << a.bins << ',' << hist_s << ',' << sym_s << ',';
        if (std::isnan(cls_s))
            csv << "";
        else
            csv << cls_s;
        csv << '\n';
        std::cout << "N=" << N << " K=" << a.K << "  t_hist=" << hist_s << "s  t_s=" << sym_s
                  << "s" << (std::isnan(cls_s) ? "" : "  t_c=" + std::to_string(cls_s) + "s")
                  << (fr.converged ? "" : "  (symbolic fit not converged)") << "\n";
    }
    histcl::io::atomic_write(a.output, csv.str());
    man.outputs = {a.output};
    std::cout << "wrote " << a.output << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Histogram-based composite likelihood fitting for spatial extremes"};
    app.require_subcommand(1);
    app.set_version_flag("--version", histcl::version);

    unsigned threads = 0;
    app.add_option("--threads", threads, "Worker thread cap (0 = hardware)")->capture_default_str();

    SimulateArgs sim;
    auto* c_sim = app.add_subcommand("simulate", "Draw sites and max-stable realizations");
    c_sim->add_option("--K", sim.K, "Number of sites")->required();
    c_sim->add_option("--N", sim.N, "Number of realizations")->required();
    c_sim->add_option("--sigma", sim.sigma, "Dependence matrix s11,s12,s22")->required();
    c_sim->add_option("--margins", sim.margins, "Constant GEV margins mu,sigma,xi (default 0,1,0)");
    c_sim->add_option("--margins-varying", sim.margins_varying,
                      "Spatially varying margins a0,a1,a2,b0,b1,b2,xi");
    c_sim->add_option("--seed", sim.seed, "Random seed")->capture_default_str();
    c_sim->add_option("--window", sim.window, "Site window x_lo x_hi y_lo y_hi")->expected(4);
    c_sim->add_option("--expansion", sim.expansion, "Storm window expansion factor")
        ->capture_default_str();
    c_sim->add_option("-o,--out-prefix", sim.out_prefix, "Output prefix")->capture_default_str();

    AggregateArgs agg;
    auto* c_agg = app.add_subcommand("aggregate", "Bin micro-data CSV into histogram JSON");
    c_agg->add_option("input", agg.input, "Micro-data CSV")->required();
    c_agg->add_option("--bins", agg.bins, "Bins per margin (scalar or comma list; default 25)");
    c_agg->add_option("--breaks", agg.breaks_json, "Histogram JSON supplying explicit breakpoints");
    c_agg->add_option("--T", agg.T, "Number of temporal blocks")->capture_default_str();
    c_agg->add_flag("--detrend", agg.detrend, "Linearly detrend each column first");
    c_agg->add_option("--block-len", agg.block_len, "Take block maxima of this length first");
    c_agg->add_flag("--clamp", agg.clamp, "Map out-of-span data into edge bins");
    c_agg->add_option("-o,--output", agg.output, "Output JSON")->capture_default_str();

    FitArgs fit;
    auto* c_fit = app.add_subcommand("fit", "Maximize a composite log-likelihood");
    c_fit->add_option("hist", fit.hist_json, "Histogram JSON (symbolic path)");
    c_fit->add_option("--classic", fit.classic_csv, "Micro-data CSV (classic path)");
    c_fit->add_option("--sites", fit.sites_csv, "Sites CSV")->required();
    c_fit->add_option("--order", fit.order, "Composite order j (2 or 3)")->capture_default_str();
    c_fit->add_option("--margins-model", fit.margin_model, "constant | varying")
        ->capture_default_str();
    c_fit->add_option("--init", fit.init, "Starting parameters (comma list, natural scale)");
    c_fit->add_option("--tol", fit.tol, "Convergence tolerance")->capture_default_str();
    c_fit->add_option("--max-iter", fit.max_iter, "Iteration cap")->capture_default_str();
    c_fit->add_option("-o,--output", fit.output, "Output JSON")->capture_default_str();

    VarianceArgs var;
    auto* c_var = app.add_subcommand("variance", "Godambe sandwich variance for a fit");
    c_var->add_option("--fit", var.fit_json, "Fit JSON")->required();
    c_var->add_option("--sites", var.sites_csv, "Sites CSV")->required();
    c_var->add_option("--hist", var.hist_json, "Histogram JSON (symbolic fits)");
    c_var->add_option("--data", var.data_csv, "Micro-data CSV (classic fits, or to re-block)");
    c_var->add_option("--T", var.T, "Re-aggregate micro-data into T blocks");
    c_var->add_option("-o,--output", var.output, "Output JSON (default: rewrite --fit)");

    ReportArgs rep;
    auto* c_rep = app.add_subcommand("report", "Derived tables as CSV");
    c_rep->add_option("mode", rep.mode, "return-levels | qq | terms | summary")->required();
    c_rep->add_option("--fit", rep.fit_json, "Fit JSON");
    c_rep->add_option("--sites", rep.sites_csv, "Sites CSV");
    c_rep->add_option("--data", rep.data_csv, "Micro-data CSV");
    c_rep->add_option("--hist", rep.hist_json, "Histogram JSON");
    c_rep->add_option("--years", rep.years, "Return period in years")->capture_default_str();
    c_rep->add_option("--blocks-per-year", rep.blocks_per_year, "Block maxima per year")
        ->capture_default_str();
    c_rep->add_option("--N", rep.N, "Observations per site");
    c_rep->add_option("--K", rep.K, "Number of sites");
    c_rep->add_option("--B", rep.B, "Bins per margin");
    c_rep->add_option("--order", rep.order, "Composite order j")->capture_default_str();
    c_rep->add_option("--fits", rep.fit_files, "Fit JSONs for summary mode");
    c_rep->add_option("-o,--output", rep.output, "Output CSV")->capture_default_str();

    BenchArgs bench;
    auto* c_bench = app.add_subcommand("bench", "Timing table for aggregation and fits");
    c_bench->add_option("--N", bench.N_list, "Dataset sizes");
    c_bench->add_option("--K", bench.K, "Number of sites")->capture_default_str();
    c_bench->add_option("--bins", bench.bins, "Bins per margin")->capture_default_str();
    c_bench->add_option("--sigma", bench.sigma, "Dependence matrix")->capture_default_str();
    c_bench->add_option("--seed", bench.seed, "Random seed")->capture_default_str();
    c_bench->add_flag("--with-classic", bench.with_classic, "Also time the classic fit");
    c_bench->add_option("--classic-cap", bench.classic_cap,
                        "Iteration cap for the classic fit (timing lower bound)")
        ->capture_default_str();
    c_bench->add_option("-o,--output", bench.output, "Output CSV")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
        app.exit(e);
        return 2;
    }

    histcl::parallel::set_max_threads(threads);

    Manifest man;
    man.threads = threads;
    try {
        if (c_sim->parsed()) {
            man.command = "simulate";
            man.options = {{"K", sim.K},       {"N", sim.N},           {"sigma", sim.sigma},
                           {"margins", sim.margins}, {"margins_varying", sim.margins_varying},
                           {"seed", sim.seed}, {"window", sim.window}, {"expansion", sim.expansion},
                           {"out_prefix", sim.out_prefix}};
            run_simulate(sim, man);
        } else if (c_agg->parsed()) {
            man.command = "aggregate";
            man.options = {{"input", agg.input},   {"bins", agg.bins},
                           {"breaks", agg.breaks_json}, {"T", agg.T},
                           {"detrend", agg.detrend},    {"block_len", agg.block_len},
                           {"clamp", agg.clamp},        {"output", agg.output}};
            run_aggregate(agg, man);
        } else if (c_fit->parsed()) {
            man.command = "fit";
            man.options = {{"hist", fit.hist_json},     {"classic", fit.classic_csv},
                           {"sites", fit.sites_csv},    {"order", fit.order},
                           {"margins_model", fit.margin_model}, {"init", fit.init},
                           {"tol", fit.tol},            {"max_iter", fit.max_iter},
                           {"output", fit.output}};
            run_fit(fit, man);
        } else if (c_var->parsed()) {
            man.command = "variance";
            man.options = {{"fit", var.fit_json}, {"sites", var.sites_csv},
                           {"hist", var.hist_json}, {"data", var.data_csv},
                           {"T", var.T},          {"output", var.output}};
            run_variance(var, man);
        } else if (c_rep->parsed()) {
            man.command = "report";
            man.options = {{"mode", rep.mode},       {"fit", rep.fit_json},
                           {"sites", rep.sites_csv}, {"data", rep.data_csv},
                           {"hist", rep.hist_json},  {"years", rep.years},
                           {"blocks_per_year", rep.blocks_per_year},
                           {"N", rep.N},             {"K", rep.K},
                           {"B", rep.B},             {"order", rep.order},
                           {"output", rep.output}};
            run_report(rep, man);
        } else if (c_bench->parsed()) {
            man.command = "bench";
            man.options = {{"N", bench.N_list},   {"K", bench.K},
                           {"bins", bench.bins},  {"sigma", bench.sigma},
                           {"seed", bench.seed},  {"with_classic", bench.with_classic},
                           {"classic_cap", bench.classic_cap}, {"output", bench.output}};
            run_bench(bench, man);
        }
        man.write();
    } catch (const CLI::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const data_error& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const numeric_error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
    return 0;
}
