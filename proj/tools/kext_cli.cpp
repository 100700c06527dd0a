// Command-line front end: integrate orbits, tabulate periods, scan the
// rational-ratio set, classify single orbits, and run the spectral
// verification.  All data files are deterministic (17 significant digits,
// no timestamps).  Exit codes: 0 success, 1 numerical failure, 2 usage.

#include <algorithm>
#include <atomic>
#include <climits>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <numbers>
#include <numeric>
#include <optional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "kext/kext.hpp"

using nlohmann::json;
using namespace kext;

namespace {

void parallel_for(std::size_t n, unsigned threads,
                  const std::function<void(std::size_t)>& body)
{
    if (threads <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i)
            body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    const unsigned use = std::min<unsigned>(threads, n);
    for (unsigned t = 0; t < use; ++t)
        pool.emplace_back([&] {
            try {
                for (std::size_t i = next.fetch_add(1); i < n;
                     i = next.fetch_add(1))
                    body(i);
            } catch (...) {
                const std::lock_guard<std::mutex> lock(error_mutex);
                if (!error)
                    error = std::current_exception();
                next.store(n);
            }
        });
    for (auto& th : pool)
        th.join();
    if (error)
        std::rethrow_exception(error);
}

json class_to_json(const SolutionClass& sc)
{
    json j;
    j["p"] = sc.p;
    j["kind"] = to_string(sc.kind);
    j["R"] = sc.ratio ? json(sc.ratio->value) : json(nullptr);
    if (sc.ratio && sc.ratio->rational)
        j["fraction"] = {{"q", sc.ratio->rational->num},
                         {"m", sc.ratio->rational->den}};
    else
        j["fraction"] = nullptr;
    j["period"] = (sc.kind == SolutionKind::Periodic) ? json(sc.period_tau)
                                                      : json(nullptr);
    j["period_y"] = (sc.kind == SolutionKind::Periodic) ? json(sc.period_y)
                                                        : json(nullptr);
    j["zeros_phi1"] = sc.zeros_phi1;
    j["phi2_min"] = sc.phi2_min;
    j["shape"] = to_string(sc.shape);
    return j;
}

json report_to_json(const SpectralReport& rep)
{
    json j;
    j["lambda1"] = rep.lambda1;
    j["multiplicity"] = rep.multiplicity_at_2;
    j["area"] = rep.area;
    j["product"] = rep.product;
    j["product_over_pi"] = rep.product_over_pi;
    j["target_12piE"] = rep.target_12piE;
    json eig;
    for (const auto& m : rep.modes) {
        const std::string key = "k" + std::to_string(m.k) +
                                (m.parity == Parity::Even ? "_even" : "_odd");
        eig[key] = m.extrapolated;
    }
    j["eigenvalues"] = eig;
    return j;
}

void write_json(const json& j, const std::string& path)
{
    std::ofstream out = open_output(path);
    out << j.dump(2) << '\n';
}

int cmd_integrate(double p, double y_end, double tol, const std::string& out,
                  const std::string& separated_out)
{
    InitParam ip(p);
    Trajectory traj = integrate(ip, y_end, tol, tol * 1e-2);
    export_trajectory_csv(traj, out);
    if (!separated_out.empty()) {
        export_separated_csv(reparameterize(traj), separated_out);
        std::printf("integrate: separated trajectory -> %s\n",
                    separated_out.c_str());
    }
    std::printf("integrate: p=%s y_end=%s steps=%zu max_H_drift=%s -> %s\n",
                format_double(p).c_str(), format_double(y_end).c_str(),
                traj.step_count(), format_double(traj.max_drift()).c_str(),
                out.c_str());
    if (ip.is_sqrt32) {
        double min_norm = 1e300, first_below = -1.0;
        for (const PhaseState& s : traj.sample_uniform(4000)) {
            const double n = std::hypot(s.phi1, s.phi2);
            if (n < min_norm)
                min_norm = n;
            if (first_below < 0.0 && n < 1e-3)
                first_below = s.y;
        }
        std::printf("decay: min ||(phi1,phi2)|| = %s, first y with norm < 1e-3"
                    " = %s\n",
                    format_double(min_norm).c_str(),
                    format_double(first_below).c_str());
    }
    return 0;
}

int cmd_periods(double p_min, double p_max, std::size_t count,
                unsigned threads, const std::string& out)
{
    std::vector<PeriodPair> rows(count);
    parallel_for(count, threads, [&](std::size_t i) {
        const double p = p_min + (p_max - p_min) * static_cast<double>(i) /
                                     static_cast<double>(count - 1);
        rows[i] = periods(InitParam(p));
    });
    export_period_table_csv(rows, out);
    std::size_t violations = 0;
    for (const auto& r : rows)
        if (!(r.t_v > r.t_u))
            ++violations;
    std::printf("periods: %zu rows on [%s, %s] -> %s (T_v > T_u violations:"
                " %zu)\n",
                count, format_double(p_min).c_str(),
                format_double(p_max).c_str(), out.c_str(), violations);
    return 0;
}

int cmd_scan(std::int64_t denom_cap, double r_min, double r_max,
             std::size_t grid_n, unsigned threads, const std::string& out)
{
    // irreducible q/m inside [r_min, r_max], ordered by (m, q)
    std::vector<Fraction> targets;
    for (std::int64_t m = 2; m <= denom_cap; ++m) {
        const std::int64_t q_lo =
            static_cast<std::int64_t>(std::ceil(r_min * static_cast<double>(m)));
        const std::int64_t q_hi = static_cast<std::int64_t>(
            std::floor(r_max * static_cast<double>(m)));
        for (std::int64_t q = q_lo; q <= q_hi; ++q)
            if (std::gcd(q, m) == 1)
                targets.push_back(Fraction{q, m});
    }

    json result;
    result["denom_cap"] = denom_cap;
    result["range"] = {r_min, r_max};
    result["fractions"] = json::array();
    json summary;
    std::vector<std::string> condition9_hits;

    if (targets.empty()) {
        result["summary"] = {{"condition9_count", 0}};
        write_json(result, out);
        std::printf("scan: empty target set -> %s\n", out.c_str());
        return 0;
    }

    RatioGrid grid;
    {
        const double p_lo = 0.01, p_hi = kSqrt32 - 0.004;
        grid.p.resize(grid_n);
        grid.r.resize(grid_n);
        parallel_for(grid_n, threads, [&](std::size_t i) {
            grid.p[i] = p_lo + (p_hi - p_lo) * static_cast<double>(i) /
                                   static_cast<double>(grid_n - 1);
            grid.r[i] = ratio(InitParam(grid.p[i]));
        });
    }

    // the constant-v orbit participates in the uniqueness statement even
    // though its ratio is not detected as rational
    {
        InitParam p38(kSqrt38);
        const ZeroCount zc = count_zeros_per_period(p38);
        json e;
        e["p"] = p38.p;
        e["kind"] = "periodic";
        e["origin"] = "constant_v";
        e["zeros_phi1"] = zc.zeros_phi1;
        e["phi2_min"] = zc.phi2_min;
        e["condition9"] = (zc.zeros_phi1 == 2 && zc.phi2_min > 0.0);
        e["shape"] = to_string(OrbitShape::DegenerateHyperbola);
        result["sqrt38"] = e;
        if (zc.zeros_phi1 == 2 && zc.phi2_min > 0.0)
            condition9_hits.push_back("sqrt(3/8)");
    }

    struct Row {
        Fraction f;
        std::vector<double> roots;
        std::vector<ZeroCount> counts;
    };
    std::vector<Row> rows(targets.size());
    parallel_for(targets.size(), threads, [&](std::size_t i) {
        Row row;
        row.f = targets[i];
        row.roots = solve_ratio_equation(targets[i], grid);
        for (double p : row.roots) {
            InitParam ip(p);
            if (ip.is_sqrt38) {
                row.counts.push_back(ZeroCount{});
                continue;
            }
            row.counts.push_back(count_zeros_per_period(ip, targets[i]));
        }
        rows[i] = std::move(row);
    });

    long min_zeros_other = LONG_MAX;
    for (const Row& row : rows) {
        json fr;
        fr["q"] = row.f.num;
        fr["m"] = row.f.den;
        fr["value"] = row.f.value();
        fr["roots"] = json::array();
        for (std::size_t k = 0; k < row.roots.size(); ++k) {
            const double p = row.roots[k];
            const ZeroCount& zc = row.counts[k];
            json r;
            r["p"] = p;
            r["zeros_phi1"] = zc.zeros_phi1;
            r["phi2_min"] = zc.phi2_min;
            r["period_y"] = zc.period_y;
            const bool c9 = (zc.zeros_phi1 == 2 && zc.phi2_min > 0.0);
            r["condition9"] = c9;
            if (c9)
                condition9_hits.push_back(format_double(p));
            if (std::abs(p - kSqrt38) > 1e-6)
                min_zeros_other = std::min(min_zeros_other, zc.zeros_phi1);
            fr["roots"].push_back(r);
        }
        result["fractions"].push_back(fr);
    }

    summary["targets"] = targets.size();
    summary["condition9_count"] = condition9_hits.size();
    summary["condition9_solutions"] = condition9_hits;
    if (min_zeros_other != LONG_MAX)
        summary["min_zeros_phi1_other"] = min_zeros_other;
    result["summary"] = summary;
    write_json(result, out);
    std::printf("scan: %zu fractions, condition-(9) solutions: %zu -> %s\n",
                targets.size(), condition9_hits.size(), out.c_str());
    for (const std::string& s : condition9_hits)
        std::printf("  condition9: p = %s\n", s.c_str());
    return 0;
}

int cmd_classify(double p, double eps, std::int64_t cap,
                 const std::string& out)
{
    ClassifyOptions opt;
    opt.rational_eps = eps;
    opt.denom_cap = cap;
    const SolutionClass sc = classify(InitParam(p), opt);
    json j = class_to_json(sc);
    write_json(j, out);
    std::printf("classify: p=%s kind=%s shape=%s zeros_phi1=%ld -> %s\n",
                format_double(p).c_str(), to_string(sc.kind),
                to_string(sc.shape), sc.zeros_phi1, out.c_str());
    return 0;
}

int cmd_verify(std::size_t grid, const std::string& out)
{
    InitParam p38(kSqrt38);
    const MetricProfile from_ode = build_metric_from_ode(p38, grid);
    const SpectralReport rep_ode = verify_extremal(from_ode, grid);
    const MetricProfile closed = build_metric_closed_form(grid);
    const SpectralReport rep_cf = verify_extremal(closed, grid);

    json j;
    j["grid"] = grid;
    j["from_ode"] = report_to_json(rep_ode);
    j["closed_form"] = report_to_json(rep_cf);
    j["product_rel_difference"] =
        std::abs(rep_ode.product - rep_cf.product) / rep_ode.product;
    write_json(j, out);

    std::printf("verify: lambda1(FromODE)    = %s, multiplicity %d\n",
                format_double(rep_ode.lambda1).c_str(),
                rep_ode.multiplicity_at_2);
    std::printf("verify: product/pi FromODE    = %s\n",
                format_double(rep_ode.product_over_pi).c_str());
    std::printf("verify: product/pi ClosedForm = %s\n",
                format_double(rep_cf.product_over_pi).c_str());
    std::printf("verify: target 12 E(2sqrt2/3) = %s -> %s\n",
                format_double(rep_ode.target_12piE / std::numbers::pi).c_str(),
                out.c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Extremal Klein-bottle eigenvalue toolkit"};
    app.set_config("--config", "", "plain-text key=value configuration file");
    app.fallthrough();
    app.require_subcommand(1);

    unsigned threads = std::max(1u, std::thread::hardware_concurrency());
    app.add_option("--threads", threads, "worker thread count")
        ->envname("KEXT_THREADS");

    auto* c_int = app.add_subcommand("integrate", "integrate an orbit, write"
                                                  " trajectory CSV");
    double p = 0.5, y_end = 50.0, tol = 1e-10;
    std::string out_int = "kext_trajectory.csv";
    c_int->add_option("--p", p, "initial value phi2(0) in (0, 1]")
        ->required()
        ->check(CLI::Range(1e-300, 1.0));
    c_int->add_option("--y-end", y_end, "integration endpoint");
    c_int->add_option("--tol", tol, "relative tolerance")
        ->check(CLI::PositiveNumber)
        ->envname("KEXT_TOL");
    c_int->add_option("--out", out_int, "output CSV path")->envname("KEXT_OUT");
    std::string out_sep;
    c_int->add_option("--separated-out", out_sep,
                      "also write the (tau, u, v) trajectory CSV");

    auto* c_per = app.add_subcommand("periods", "tabulate T_u, T_v, R over a"
                                                " p-grid");
    double p_min = 0.01, p_max = 0.856;
    std::size_t count = 400;
    std::string out_per = "kext_periods.csv";
    c_per->add_option("--p-min", p_min, "grid start");
    c_per->add_option("--p-max", p_max, "grid end");
    c_per->add_option("--count", count, "grid size")
        ->check(CLI::Range(std::size_t{2}, std::size_t{1000000}));
    c_per->add_option("--out", out_per, "output CSV path")->envname("KEXT_OUT");

    auto* c_scan = app.add_subcommand("scan", "enumerate rational ratios,"
                                              " solve for p, classify");
    std::int64_t cap = 50;
    double r_min = 1.480473, r_max = 1.507784;
    std::size_t grid_n = 600;
    std::string out_scan = "kext_scan.json";
    c_scan->add_option("--denom-cap", cap, "max denominator m")
        ->check(CLI::Range(std::int64_t{1}, std::int64_t{100000}))
        ->envname("KEXT_DENOM_CAP");
    c_scan->add_option("--r-min", r_min, "lower edge of the target range");
    c_scan->add_option("--r-max", r_max, "upper edge of the target range");
    c_scan->add_option("--grid", grid_n, "ratio grid resolution");
    c_scan->add_option("--out", out_scan, "output JSON path")
        ->envname("KEXT_OUT");

    auto* c_cls = app.add_subcommand("classify", "classify a single orbit");
    double cp = 0.5, ceps = 1e-9;
    std::int64_t ccap = 1000;
    std::string out_cls = "kext_class.json";
    c_cls->add_option("--p", cp, "initial value phi2(0) in (0, 1]")
        ->required()
        ->check(CLI::Range(1e-300, 1.0));
    c_cls->add_option("--eps", ceps, "rational detection tolerance")
        ->check(CLI::PositiveNumber);
    c_cls->add_option("--denom-cap", ccap, "max denominator")
        ->envname("KEXT_DENOM_CAP");
    c_cls->add_option("--out", out_cls, "output JSON path")
        ->envname("KEXT_OUT");

    auto* c_ver = app.add_subcommand("verify", "spectral certificate for both"
                                               " metric pipelines");
    std::size_t grid = 4096;
    std::string out_ver = "kext_report.json";
    c_ver->add_option("--grid", grid, "eigensolver grid size")
        ->check(CLI::Range(std::size_t{64}, std::size_t{1048576}));
    c_ver->add_option("--out", out_ver, "output JSON path")
        ->envname("KEXT_OUT");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (app.got_subcommand(c_int))
            return cmd_integrate(p, y_end, tol, out_int, out_sep);
        if (app.got_subcommand(c_per))
            return cmd_periods(p_min, p_max, count, threads, out_per);
        if (app.got_subcommand(c_scan))
            return cmd_scan(cap, r_min, r_max, grid_n, threads, out_scan);
        if (app.got_subcommand(c_cls))
            return cmd_classify(cp, ceps, ccap, out_cls);
        if (app.got_subcommand(c_ver))
            return cmd_verify(grid, out_ver);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 2;
}
