#include "afm/cli.hpp"

#include "afm/acvf.hpp"
#include "afm/asymptotic_covariance.hpp"
#include "afm/errors.hpp"
#include "afm/forecast.hpp"
#include "afm/gw_test.hpp"
#include "afm/irf.hpp"
#include "afm/simulate.hpp"
#include "afm/spectral.hpp"
#include "afm/whittle.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <Eigen/Dense>

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace afm::cli {

namespace {

using json = nlohmann::ordered_json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Thrown for bad flags, inputs or combinations; maps to exit code 1.
struct usage_failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------- parsing

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::optional<double> parse_number(const std::string& text) {
    const std::string t = trim(text);
    if (t.empty()) return std::nullopt;
    double value = 0.0;
    const char* first = t.data();
    if (*first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, t.data() + t.size(), value);
    if (ec != std::errc() || ptr != t.data() + t.size()) return std::nullopt;
    return value;
}

Eigen::VectorXd to_vector(const std::vector<double>& v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Eigen::VectorXd json_array(const json& node, const std::string& where) {
    if (!node.is_array()) throw usage_failure(where + ": field is not an array");
    std::vector<double> values;
    values.reserve(node.size());
    for (const auto& item : node) {
        if (item.is_null()) {
            values.push_back(kNaN);
        } else if (item.is_number()) {
            values.push_back(item.get<double>());
        } else {
            throw usage_failure(where + ": array holds a non-numeric entry");
        }
    }
    return to_vector(values);
}

Eigen::VectorXd read_json(const std::string& text, const std::string& path, const std::string& field) {
    std::vector<json> docs;
    try {
        docs.push_back(json::parse(text));
    } catch (const json::parse_error&) {
        std::istringstream lines(text);
        std::string line;
        int lineno = 0;
        while (std::getline(lines, line)) {
            ++lineno;
            if (trim(line).empty()) continue;
            try {
                docs.push_back(json::parse(line));
            } catch (const json::parse_error& e) {
                throw usage_failure(path + ":" + std::to_string(lineno) + ": malformed JSON (" + e.what() + ")");
            }
        }
    }
    const std::vector<std::string> keys = field.empty() ? std::vector<std::string>{"values", "predictions"}
                                                        : std::vector<std::string>{field};
    for (const std::string& key : keys) {
        for (const json& doc : docs) {
            if (doc.is_array() && field.empty()) return json_array(doc, path);
            if (doc.is_object() && doc.contains(key)) return json_array(doc[key], path + "#" + key);
        }
    }
    throw usage_failure(path + ": no JSON array field '" + (field.empty() ? std::string("values") : field) + "'");
}

Eigen::VectorXd read_csv(const std::string& text, const std::string& path) {
    std::istringstream lines(text);
    std::string line;
    std::vector<double> values;
    int lineno = 0;
    bool header_seen = false;
    while (std::getline(lines, line)) {
        ++lineno;
        std::string cell = trim(line);
        if (cell.empty()) continue;
        if (cell.find(',') != std::string::npos) {
            throw usage_failure(path + ":" + std::to_string(lineno) + ": expected a single column");
        }
        if (cell.size() >= 2 && cell.front() == '"' && cell.back() == '"') cell = cell.substr(1, cell.size() - 2);
        const auto value = parse_number(cell);
        if (!value) {
            if (values.empty() && !header_seen) {
                header_seen = true;
                continue;
            }
            throw usage_failure(path + ":" + std::to_string(lineno) + ": not a number: '" + cell + "'");
        }
        values.push_back(*value);
    }
    if (values.empty()) throw usage_failure(path + ": no observations");
    return to_vector(values);
}

// --------------------------------------------------------------- output

std::string format_number(double v) {
    if (std::isnan(v)) return "NA";
    if (std::isinf(v)) return v > 0 ? "Inf" : "-Inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json number(double v) {
    if (std::isfinite(v)) return v;
    return nullptr;
}

json array(const Eigen::Ref<const Eigen::VectorXd>& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(number(v(i)));
    return out;
}

std::string csv_cell(const json& v) {
    if (v.is_null()) return "NA";
    if (v.is_number_float()) return format_number(v.get<double>());
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
}

// Collects one main table (the CSV payload, also emitted as JSON rows) plus
// extra JSON records.
class Report {
public:
    Report(std::string record, std::vector<std::string> columns)
        : record_(std::move(record)), columns_(std::move(columns)) {}

    void row(std::vector<json> cells) { rows_.push_back(std::move(cells)); }
    void note(json object) { notes_.push_back(std::move(object)); }

    std::string render(bool csv) const {
        std::ostringstream s;
        if (csv) {
            for (std::size_t i = 0; i < columns_.size(); ++i) s << (i ? "," : "") << columns_[i];
            s << '\n';
            for (const auto& r : rows_) {
                for (std::size_t i = 0; i < r.size(); ++i) s << (i ? "," : "") << csv_cell(r[i]);
                s << '\n';
            }
            return s.str();
        }
        for (const json& n : notes_) s << n.dump() << '\n';
        for (const auto& r : rows_) {
            json obj;
            obj["record"] = record_;
            for (std::size_t i = 0; i < r.size(); ++i) obj[columns_[i]] = r[i];
            s << obj.dump() << '\n';
        }
        return s.str();
    }

private:
    std::string record_;
    std::vector<std::string> columns_;
    std::vector<std::vector<json>> rows_;
    std::vector<json> notes_;
};

void write_atomically(const std::string& path, const std::string& payload) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp." + std::to_string(std::random_device{}());
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw usage_failure("cannot write " + tmp.string());
        f << payload;
        f.flush();
        if (!f) {
            f.close();
            fs::remove(tmp);
            throw usage_failure("write failed for " + tmp.string());
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp);
        throw usage_failure("cannot move output into place at " + path + ": " + ec.message());
    }
}

// --------------------------------------------------------------- options

struct ModelFlags {
    std::optional<double> d;
    std::vector<double> ar;
    std::vector<double> ma;
    std::optional<double> sigma2;
    bool any() const { return d || !ar.empty() || !ma.empty() || sigma2; }
    ArfimaModel model() const { return ArfimaModel(d.value_or(0.0), to_vector(ar), to_vector(ma), sigma2.value_or(1.0)); }
};

struct Options {
    std::string input;
    std::string output;
    std::string format = "json";
    ModelFlags model;
    int p = 0;
    int q = 0;
    int p_max = 2;
    int q_max = 2;
    std::vector<std::string> fix;
    long h_max = 50;
    std::string acvf_method = "exact";
    long switch_lag = 50;
    long n = 1000;
    std::optional<std::uint64_t> seed;
    int ahead = 1;
    bool rolling = false;
    long origin = -1;
    int tau = 1;
    long count = 0;
    bool benchmark = false;
    std::string refit = "every";
    std::string x, z, y;
    std::string method = "newey_west";
    std::string alternative = "two_sided";
    std::optional<int> bandwidth;
    std::optional<int> max_lag;
    double alpha = 0.05;
    long points = 256;
};

void add_model_flags(CLI::App* app, Options& o) {
    app->add_option("--d", o.model.d, "Fractional differencing parameter d in (-1, 0.5)");
    app->add_option("--ar", o.model.ar, "AR coefficients phi_1..phi_p (comma separated)")->delimiter(',');
    app->add_option("--ma", o.model.ma, "MA coefficients theta_1..theta_q (comma separated)")->delimiter(',');
    app->add_option("--sigma2", o.model.sigma2, "Innovation variance (default 1)");
}

void add_io_flags(CLI::App* app, Options& o, bool input_required) {
    auto* in = app->add_option("--input,-i", o.input, "Series file (single-column CSV or JSON)");
    if (input_required) in->required();
    app->add_option("--output,-o", o.output, "Write results here (atomically) instead of stdout");
    app->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
}

void add_order_flags(CLI::App* app, Options& o) {
    app->add_option("--p", o.p, "AR order for estimation")->check(CLI::Range(0, 5));
    app->add_option("--q", o.q, "MA order for estimation")->check(CLI::Range(0, 5));
}

FixedParameters parse_fixed(const std::vector<std::string>& items, int p, int q) {
    FixedParameters fixed;
    for (const std::string& item : items) {
        const auto eq = item.find('=');
        const auto value = eq == std::string::npos ? std::nullopt : parse_number(item.substr(eq + 1));
        const std::string key = trim(item.substr(0, eq));
        if (!value) throw usage_failure("--fix expects NAME=VALUE, got '" + item + "'");
        int index = -1;
        if (key == "d") {
            index = 0;
        } else if (key.size() > 3 && key.rfind("phi", 0) == 0) {
            index = std::atoi(key.c_str() + 3);
            if (index < 1 || index > p) throw usage_failure("--fix: " + key + " is outside 1..p");
        } else if (key.size() > 5 && key.rfind("theta", 0) == 0) {
            const int j = std::atoi(key.c_str() + 5);
            if (j < 1 || j > q) throw usage_failure("--fix: " + key + " is outside 1..q");
            index = p + j;
        } else {
            throw usage_failure("--fix: unknown parameter '" + key + "' (use d, phi<i>, theta<j>)");
        }
        fixed[index] = *value;
    }
    return fixed;
}

std::uint64_t resolve_seed(const Options& o) {
    if (o.seed) return *o.seed;
    if (const char* env = std::getenv("AFM_SEED")) {
        const auto v = parse_number(env);
        if (!v || *v < 0 || *v != std::floor(*v)) throw usage_failure("AFM_SEED must be a nonnegative integer");
        return static_cast<std::uint64_t>(*v);
    }
    return 1;
}

TimeSeries load_series(const std::string& path) {
    const Eigen::VectorXd v = read_series_file(path);
    if (!v.allFinite()) throw usage_failure(path + ": series holds missing or non-finite values");
    return TimeSeries(v);
}

// --------------------------------------------------------------- commands

struct Outcome {
    std::string payload;
    std::optional<std::string> failure;  // non-convergence message, exit 2
};

json model_record(const ArfimaModel& m) {
    return json{{"record", "model"}, {"d", m.d()}, {"ar", array(m.ar())}, {"ma", array(m.ma())}, {"sigma2", m.sigma2()}};
}

// Exact SEs for the free parameters from the information matrix restricted
// to them; fixed entries get 0 and boundary models NaN.
Eigen::VectorXd exact_free_stderr(const FitReport& fit) {
    const Eigen::Index k = fit.model.num_parameters();
    Eigen::VectorXd out = Eigen::VectorXd::Constant(k, kNaN);
    std::vector<Eigen::Index> free;
    for (Eigen::Index i = 0; i < k; ++i) {
        if (fit.fixed_mask[static_cast<std::size_t>(i)]) out(i) = 0.0;
        else free.push_back(i);
    }
    try {
        const Eigen::MatrixXd info = fisher_matrix(fit.model).info;
        Eigen::MatrixXd sub(free.size(), free.size());
        for (std::size_t a = 0; a < free.size(); ++a)
            for (std::size_t b = 0; b < free.size(); ++b) sub(a, b) = info(free[a], free[b]);
        Eigen::LLT<Eigen::MatrixXd> llt(sub);
        if (llt.info() != Eigen::Success) return out;
        const Eigen::MatrixXd cov = llt.solve(Eigen::MatrixXd::Identity(sub.rows(), sub.cols()));
        for (std::size_t a = 0; a < free.size(); ++a) {
            out(free[a]) = std::sqrt(cov(a, a) / static_cast<double>(fit.n));
        }
    } catch (const std::exception&) {
    }
    return out;
}

Outcome cmd_fit(const Options& o) {
    const TimeSeries series = load_series(o.input);
    const FitReport fit = whittle_fit(series, o.p, o.q, parse_fixed(o.fix, o.p, o.q));
    const Eigen::VectorXd est = fit.model.parameters();
    const Eigen::VectorXd se_exact = exact_free_stderr(fit);
    const auto names = fit.model.parameter_names();

    Report r("coef", {"name", "estimate", "stderr_hessian", "stderr_exact", "t_value", "p_value", "fixed"});
    for (Eigen::Index i = 0; i < est.size(); ++i) {
        const bool fixed = fit.fixed_mask[static_cast<std::size_t>(i)];
        const double t = fixed ? kNaN : est(i) / fit.stderr_hessian(i);
        r.row({names[static_cast<std::size_t>(i)], number(est(i)), number(fit.stderr_hessian(i)), number(se_exact(i)),
               number(t), number(fixed ? kNaN : two_sided_normal_p(t)), fixed});
    }
    r.note(json{{"record", "fit"},
                {"n", fit.n},
                {"p", o.p},
                {"q", o.q},
                {"sigma2", fit.model.sigma2()},
                {"sd_innov", std::sqrt(fit.model.sigma2())},
                {"loglik", fit.loglik},
                {"loglik_total", fit.loglik_total},
                {"aic", fit.aic},
                {"converged", fit.converged},
                {"iterations", fit.iterations},
                {"hessian_ok", fit.hessian_ok}});
    Outcome out{r.render(o.format == "csv"), std::nullopt};
    if (!fit.converged) out.failure = "whittle_fit did not converge";
    return out;
}

Outcome cmd_select(const Options& o) {
    const TimeSeries series = load_series(o.input);
    if (o.p_max < 0 || o.q_max < 0 || o.p_max > 5 || o.q_max > 5) throw usage_failure("orders must lie in 0..5");
    const auto rows = model_selection(series, o.p_max, o.q_max);
    Report r("selection", {"rank", "p", "q", "aic", "d", "p_value_d", "converged", "failed"});
    int rank = 0;
    for (const auto& row : rows) {
        r.row({++rank, row.p, row.q, number(row.aic), number(row.d), number(row.p_value_d), row.converged, row.failed});
    }
    return {r.render(o.format == "csv"), std::nullopt};
}

Outcome cmd_acvf(const Options& o) {
    if (o.h_max < 0) throw usage_failure("--h-max must be nonnegative");
    const ArfimaModel model = o.model.model();
    const AcvfResult res = o.acvf_method == "hybrid" ? acvf_hybrid(model, o.h_max, o.switch_lag)
                                                     : acvf_sowell(model, o.h_max);
    Report r("acvf", {"lag", "gamma", "rho", "method"});
    for (Eigen::Index h = 0; h < res.gamma.size(); ++h) {
        const bool exact = res.method_per_lag[static_cast<std::size_t>(h)] == AcvfMethod::exact;
        r.row({res.lags(h), number(res.gamma(h)), number(res.gamma(h) / res.gamma(0)), exact ? "exact" : "asymptotic"});
    }
    return {r.render(o.format == "csv"), std::nullopt};
}

// Explicit model flags win; otherwise fit (p, q) to the series.
std::pair<ArfimaModel, std::optional<std::string>> resolve_model(const Options& o, const TimeSeries& series) {
    if (o.model.any()) return {o.model.model(), std::nullopt};
    WhittleOptions options;
    options.compute_residuals = false;
    const FitReport fit = whittle_fit(series, o.p, o.q, parse_fixed(o.fix, o.p, o.q), options);
    return {fit.model, fit.converged ? std::nullopt : std::optional<std::string>("whittle_fit did not converge")};
}

Outcome cmd_spectrum(const Options& o) {
    Outcome out;
    if (o.input.empty()) {
        if (!o.model.any()) throw usage_failure("spectrum needs model flags or --input");
        if (o.points < 1) throw usage_failure("--points must be positive");
        const ArfimaModel model = o.model.model();
        Report r("spectrum", {"lambda", "density"});
        for (long j = 1; j <= o.points; ++j) {
            const double lambda = std::numbers::pi * static_cast<double>(j) / static_cast<double>(o.points);
            r.row({lambda, number(spectral_density(model, lambda))});
        }
        out.payload = r.render(o.format == "csv");
        return out;
    }
    const TimeSeries series = load_series(o.input);
    auto [model, failure] = resolve_model(o, series);
    out.failure = failure;
    const Periodogram pg = periodogram(series);
    const Eigen::VectorXd f = spectral_density(model, pg.frequencies);
    Report r("spectrum", {"lambda", "density", "periodogram"});
    for (Eigen::Index j = 0; j < pg.size(); ++j) r.row({pg.frequencies(j), number(f(j)), pg.ordinates(j)});
    r.note(model_record(model));
    out.payload = r.render(o.format == "csv");
    return out;
}

Outcome cmd_irf(const Options& o) {
    if (o.h_max < 0) throw usage_failure("--h-max must be nonnegative");
    const IrfResult res = impulse_response(o.model.model(), o.h_max);
    Report r("irf", {"lag", "exact", "asymptotic"});
    for (Eigen::Index j = 0; j < res.exact.size(); ++j) r.row({j, number(res.exact(j)), number(res.asymptotic(j))});
    if (res.asymptotic_degenerate) r.note(json{{"record", "warning"}, {"message", "d = 0: no asymptotic power-law tail"}});
    return {r.render(o.format == "csv"), std::nullopt};
}

Outcome cmd_simulate(const Options& o) {
    if (o.n < 2) throw usage_failure("--n must be at least 2");
    const std::uint64_t seed = resolve_seed(o);
    const ArfimaModel model = o.model.model();
    const TimeSeries series = simulate(model, o.n, seed);
    if (o.format == "csv") {
        std::ostringstream s;
        s << "value\n";
        for (Eigen::Index t = 0; t < series.size(); ++t) s << format_number(series.values()(t)) << '\n';
        return {s.str(), std::nullopt};
    }
    json rec{{"record", "series"}, {"n", o.n}, {"seed", seed}, {"model", model_record(model)},
             {"values", array(series.values())}};
    return {rec.dump() + "\n", std::nullopt};
}

Outcome cmd_forecast(const Options& o) {
    const TimeSeries series = load_series(o.input);
    Outcome out;
    if (o.rolling) {
        if (o.origin < 0) throw usage_failure("--rolling needs --origin");
        ForecastModelSpec spec = o.benchmark ? ForecastModelSpec::random_walk()
                                             : ForecastModelSpec::arfima(o.p, o.q, parse_fixed(o.fix, o.p, o.q));
        const RefitPolicy policy = o.refit == "once" ? RefitPolicy::once : RefitPolicy::every_window;
        const ForecastSet set = rolling_forecasts(series, spec, o.origin, o.tau, o.count, policy);
        Report r("window", {"window", "last_index", "target_index", "prediction", "target"});
        for (Eigen::Index k = 0; k < set.predictions.size(); ++k) {
            r.row({k, o.origin + k, o.origin + k + o.tau, number(set.predictions(k)), set.target(k)});
        }
        r.note(json{{"record", "rolling"}, {"origin", set.origin}, {"tau", set.tau}, {"count", o.count},
                    {"model", o.benchmark ? "random_walk" : "arfima"}, {"missing", set.missing},
                    {"nonconverged", set.nonconverged}, {"predictions", array(set.predictions)},
                    {"target", array(set.target)}});
        out.payload = r.render(o.format == "csv");
        return out;
    }
    if (o.ahead < 1) throw usage_failure("--ahead must be at least 1");
    auto [model, failure] = resolve_model(o, series);
    out.failure = failure;
    const Eigen::VectorXd pred = forecast(model, series, o.ahead);
    Report r("forecast", {"step", "prediction"});
    for (Eigen::Index k = 0; k < pred.size(); ++k) r.row({k + 1, number(pred(k))});
    r.note(model_record(model));
    r.note(json{{"record", "forecast"}, {"ahead", o.ahead}, {"predictions", array(pred)}});
    out.payload = r.render(o.format == "csv");
    return out;
}

Outcome cmd_gwtest(const Options& o) {
    const Eigen::VectorXd x = read_series_file(o.x);
    const Eigen::VectorXd z = read_series_file(o.z);
    Eigen::VectorXd y = read_series_file(o.y);
    if (x.size() != y.size() || z.size() != y.size()) {
        throw usage_failure("gwtest: --x, --z and --y must have the same length");
    }
    // Windows with a missing prediction drop out of the comparison.
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        if (std::isfinite(x(i)) && std::isfinite(z(i)) && std::isfinite(y(i))) keep.push_back(i);
    }
    Eigen::VectorXd xs(keep.size()), zs(keep.size()), ys(keep.size());
    for (std::size_t i = 0; i < keep.size(); ++i) {
        xs(static_cast<Eigen::Index>(i)) = x(keep[i]);
        zs(static_cast<Eigen::Index>(i)) = z(keep[i]);
        ys(static_cast<Eigen::Index>(i)) = y(keep[i]);
    }
    const GwReport g = gw_test(xs, zs, ys, o.tau, parse_hac_method(o.method), parse_alternative(o.alternative),
                               o.bandwidth);
    Report r("gwtest", {"statistic", "p_value", "tau", "n", "method", "alternative", "mean_loss_diff",
                        "long_run_variance", "dropped", "degenerate", "variance_truncated"});
    r.row({number(g.statistic), g.p_value, g.tau, g.n, to_string(g.method), to_string(g.alternative),
           g.mean_loss_diff, g.long_run_variance, static_cast<long>(y.size()) - static_cast<long>(keep.size()),
           g.degenerate, g.variance_truncated});
    return {r.render(o.format == "csv"), std::nullopt};
}

Outcome cmd_diag(const Options& o) {
    const TimeSeries series = load_series(o.input);
    auto [model, failure] = resolve_model(o, series);
    const StationarityReport st = check_parameters(model);
    Outcome out;
    out.failure = failure;

    const Eigen::VectorXd res = residuals(model, series);
    const Eigen::Index n = res.size();
    const int default_lag = static_cast<int>(std::min<Eigen::Index>(10, (n - 1) / 4));
    const int max_lag = o.max_lag.value_or(default_lag);
    const auto lb = ljung_box(res, max_lag);
    const Eigen::VectorXd acf = sample_acf(res, max_lag);

    const double sd = std::sqrt((res.array() - res.mean()).square().mean());
    Report r("diagnostic", {"lag", "acf", "ljung_box", "p_value", "significant"});
    for (const auto& row : lb) {
        r.row({row.lag, acf(row.lag), row.statistic, row.p_value, row.p_value < o.alpha});
    }
    r.note(model_record(model));
    r.note(json{{"record", "stationarity"}, {"ok", st.ok()}, {"d_ok", st.d_ok}, {"ar_ok", st.ar_ok},
                {"ma_ok", st.ma_ok}, {"ar_root_moduli", array(st.ar_root_moduli)},
                {"ma_root_moduli", array(st.ma_root_moduli)}, {"common_roots", st.common_roots},
                {"repeated_ar_roots", st.repeated_ar_roots}});
    r.note(json{{"record", "residuals"}, {"n", n}, {"alpha", o.alpha}, {"acf_band", 1.96 / std::sqrt(double(n))},
                {"values", array(res.array() / sd)}});
    out.payload = r.render(o.format == "csv");
    return out;
}

Outcome cmd_smv(const Options& o) {
    if (o.n < 1) throw usage_failure("--n must be positive");
    const ArfimaModel model = o.model.model();
    const double exact = sample_mean_variance(model, o.n, true);
    const double asym = model.d() == 0.0 ? kNaN : sample_mean_variance(model, o.n, false);
    Report r("smv", {"n", "exact", "asymptotic"});
    r.row({o.n, exact, number(asym)});
    return {r.render(o.format == "csv"), std::nullopt};
}

void error_record(std::ostream& err, const std::string& kind, const std::string& message, int code) {
    err << json{{"record", "error"}, {"kind", kind}, {"message", message}, {"exit_code", code}}.dump() << '\n';
}

} // namespace

Eigen::VectorXd read_series_file(const std::string& spec) {
    std::string path = spec;
    std::string field;
    const auto hash = spec.rfind('#');
    if (hash != std::string::npos && !std::filesystem::exists(spec)) {
        path = spec.substr(0, hash);
        field = spec.substr(hash + 1);
    }
    std::ifstream f(path, std::ios::binary);
    if (!f) throw usage_failure("cannot open input file '" + path + "'");
    std::ostringstream buf;
    buf << f.rdbuf();
    const std::string text = buf.str();
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && (text[first] == '{' || text[first] == '[')) return read_json(text, path, field);
    if (!field.empty()) throw usage_failure(path + ": a #field selector needs JSON input");
    return read_csv(text, path);
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"ARFIMA(p, d, q) long-memory toolkit", "afm"};
    app.require_subcommand(1);
    app.fallthrough(false);
    Options o;

    auto* fit = app.add_subcommand("fit", "Whittle estimate of ARFIMA(p, d, q) with Hessian and exact standard errors");
    add_io_flags(fit, o, true);
    add_order_flags(fit, o);
    fit->add_option("--fix", o.fix, "Hold a parameter fixed, e.g. --fix d=0 --fix theta1=0.2");

    auto* select = app.add_subcommand("select", "AIC table over p <= p-max, q <= q-max");
    add_io_flags(select, o, true);
    select->add_option("--p-max", o.p_max, "Largest AR order")->check(CLI::Range(0, 5));
    select->add_option("--q-max", o.q_max, "Largest MA order")->check(CLI::Range(0, 5));

    auto* acvf = app.add_subcommand("acvf", "Autocovariances of a model");
    add_model_flags(acvf, o);
    acvf->add_option("--output,-o", o.output, "Write results here instead of stdout");
    acvf->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
    acvf->add_option("--h-max", o.h_max, "Largest lag");
    acvf->add_option("--method", o.acvf_method, "exact, or hybrid (asymptotic beyond --switch-lag)")
        ->check(CLI::IsMember({"exact", "hybrid"}));
    acvf->add_option("--switch-lag", o.switch_lag, "Last exact lag of the hybrid method");

    auto* spectrum = app.add_subcommand("spectrum", "Spectral density grid, with periodogram overlay when --input is given");
    add_io_flags(spectrum, o, false);
    add_model_flags(spectrum, o);
    add_order_flags(spectrum, o);
    spectrum->add_option("--points", o.points, "Grid size on (0, pi] without --input");

    auto* irf = app.add_subcommand("irf", "Exact and asymptotic impulse responses");
    add_model_flags(irf, o);
    irf->add_option("--output,-o", o.output, "Write results here instead of stdout");
    irf->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
    irf->add_option("--h-max", o.h_max, "Largest lag");

    auto* sim = app.add_subcommand("simulate", "Exact Gaussian sample path");
    add_model_flags(sim, o);
    sim->add_option("--output,-o", o.output, "Write results here instead of stdout");
    sim->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
    sim->add_option("--n", o.n, "Series length");
    sim->add_option("--seed", o.seed, "Random seed (default: AFM_SEED, else 1)");

    auto* fc = app.add_subcommand("forecast", "Multi-step forecasts, or a rolling out-of-sample exercise");
    add_io_flags(fc, o, true);
    add_model_flags(fc, o);
    add_order_flags(fc, o);
    fc->add_option("--fix", o.fix, "Hold a parameter fixed when fitting");
    fc->add_option("--ahead", o.ahead, "Forecast horizon");
    fc->add_flag("--rolling", o.rolling, "Rolling windows: refit on y[0..origin+k], predict origin+k+tau");
    fc->add_option("--origin", o.origin, "0-based index of the last in-sample observation of window 0");
    fc->add_option("--tau", o.tau, "Forecast horizon of each window");
    fc->add_option("--count", o.count, "Number of windows");
    fc->add_flag("--benchmark", o.benchmark, "Random-walk (ARIMA(0,1,0)) predictions instead of a fitted model");
    fc->add_option("--refit", o.refit, "Refit every window or once at the origin")->check(CLI::IsMember({"every", "once"}));

    auto* gw = app.add_subcommand("gwtest", "Giacomini-White test of equal absolute-error loss");
    gw->add_option("--x", o.x, "Predictions of the first model (file or file#field)")->required();
    gw->add_option("--z", o.z, "Predictions of the second model (file or file#field)")->required();
    gw->add_option("--y", o.y, "Realised values (file or file#field)")->required();
    gw->add_option("--tau", o.tau, "Forecast horizon");
    gw->add_option("--method", o.method, "simple_regression, hac, newey_west, andrews_kernel or weave");
    gw->add_option("--alternative", o.alternative, "two_sided, greater or less");
    gw->add_option("--bandwidth", o.bandwidth, "Kernel bandwidth (hac, andrews_kernel)");
    gw->add_option("--output,-o", o.output, "Write results here instead of stdout");
    gw->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"json", "csv"}));

    auto* diag = app.add_subcommand("diag", "Residual diagnostics and stationarity report");
    add_io_flags(diag, o, true);
    add_model_flags(diag, o);
    add_order_flags(diag, o);
    diag->add_option("--max-lag", o.max_lag, "Largest Ljung-Box lag (must be below n/4)");
    diag->add_option("--alpha", o.alpha, "Significance level for the Ljung-Box flags");

    auto* smv = app.add_subcommand("smv", "Exact and asymptotic variance of the sample mean");
    add_model_flags(smv, o);
    smv->add_option("--output,-o", o.output, "Write results here instead of stdout");
    smv->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
    smv->add_option("--n", o.n, "Sample size");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // --help (on the app or any subcommand) is a ParseError with exit code 0.
        if (e.get_exit_code() == 0) return app.exit(e, out, err);
        error_record(err, "usage", e.what(), usage_error);
        return usage_error;
    }

    try {
        Outcome result;
        if (fit->parsed()) result = cmd_fit(o);
        else if (select->parsed()) result = cmd_select(o);
        else if (acvf->parsed()) result = cmd_acvf(o);
        else if (spectrum->parsed()) result = cmd_spectrum(o);
        else if (irf->parsed()) result = cmd_irf(o);
        else if (sim->parsed()) result = cmd_simulate(o);
        else if (fc->parsed()) result = cmd_forecast(o);
        else if (gw->parsed()) result = cmd_gwtest(o);
        else if (diag->parsed()) result = cmd_diag(o);
        else result = cmd_smv(o);

        if (o.output.empty()) out << result.payload;
        else write_atomically(o.output, result.payload);
        if (result.failure) {
            error_record(err, "nonconvergence", *result.failure, numerical_failure);
            return numerical_failure;
        }
        return ok;
    } catch (const numerical_error& e) {
        error_record(err, "numerical", e.what(), numerical_failure);
        return numerical_failure;
    } catch (const not_implemented_error& e) {
        error_record(err, "not_implemented", e.what(), usage_error);
        return usage_error;
    } catch (const usage_failure& e) {
        error_record(err, "input", e.what(), usage_error);
        return usage_error;
    } catch (const std::invalid_argument& e) {
        error_record(err, "invalid_argument", e.what(), usage_error);
        return usage_error;
    } catch (const std::domain_error& e) {
        error_record(err, "domain", e.what(), usage_error);
        return usage_error;
    } catch (const std::exception& e) {
        error_record(err, "numerical", e.what(), numerical_failure);
        return numerical_failure;
    }
}

} // namespace afm::cli
