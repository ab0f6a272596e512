#include "qdep/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "qdep/bounds.hpp"
#include "qdep/dependence.hpp"
#include "qdep/extremal.hpp"
#include "qdep/models.hpp"
#include "qdep/oracle.hpp"
#include "qdep/version.hpp"

namespace qdep::cli {

namespace {

using json = nlohmann::ordered_json;

std::string fmt(double x, const char* spec = "%.17g") {
    char buf[48];
    std::snprintf(buf, sizeof(buf), spec, x);
    return buf;
}

// Resolved flags in canonical order; rerunning this line reproduces the file.
struct Echo {
    std::string command;
    std::vector<std::pair<std::string, std::string>> flags;

    void add(const std::string& k, const std::string& v) { flags.emplace_back(k, v); }
    void add(const std::string& k, double v) { flags.emplace_back(k, fmt(v)); }
    void add(const std::string& k, long long v) { flags.emplace_back(k, std::to_string(v)); }

    std::string command_line() const {
        std::string s = "qdep " + command;
        for (const auto& [k, v] : flags) {
            s += " --" + k;
            if (!v.empty()) s += " " + v;
        }
        return s;
    }
    std::string header_line() const {
        return "# " + command_line() + " | version " + kVersion + "\n";
    }
    json config() const {
        json c;
        for (const auto& [k, v] : flags) c[k] = v;
        return c;
    }
};

json json_skeleton(const Echo& echo) {
    json j;
    j["command"] = echo.command;
    j["version"] = kVersion;
    j["config"] = echo.config();
    return j;
}

struct FamilySpec {
    std::string name;
    std::optional<double> alpha;
    double theta = -1.0;
};

Copula make_family(const FamilySpec& spec) {
    const std::string& f = spec.name;
    if (f == "frechet-lower") return Copula::frechet_lower();
    if (f == "frechet-upper") return Copula::frechet_upper();
    if (f == "independence") return Copula::independence();
    if (f == "fgm") return Copula::fgm(spec.theta);
    if (f == "gg" || f == "gg-archimedean") {
        if (!spec.alpha) throw CLI::ValidationError("--alpha is required for " + f);
        return Copula::gg_archimedean(*spec.alpha);
    }
    if (f == "mix:frechet") {
        if (!spec.alpha) throw CLI::ValidationError("--alpha is required for " + f);
        return Copula::mix({1.0 - *spec.alpha, *spec.alpha},
                           {Copula::frechet_lower(), Copula::frechet_upper()});
    }
    if (f == "mix:fgm-fu") {
        if (!spec.alpha) throw CLI::ValidationError("--alpha is required for " + f);
        return Copula::mix({1.0 - *spec.alpha, *spec.alpha},
                           {Copula::fgm(-1.0), Copula::frechet_upper()});
    }
    throw CLI::ValidationError("unknown family '" + f + "'");
}

Distortion make_distortion(const std::string& spec) {
    if (spec == "identity") return Distortion::identity();
    if (spec.rfind("power:", 0) == 0) {
        const double k = std::stod(spec.substr(6));
        return Distortion::power(k);
    }
    throw CLI::ValidationError("unknown distortion '" + spec + "' (identity|power:K)");
}

const char* verdict_name(QdVerdict v) {
    switch (v) {
    case QdVerdict::Nqd: return "NQD";
    case QdVerdict::Pqd: return "PQD";
    case QdVerdict::Neither: return "Neither";
    }
    return "?";
}

const char* verdict_name(QdeVerdict v) {
    switch (v) {
    case QdeVerdict::Nqde: return "NQDE";
    case QdeVerdict::Pqde: return "PQDE";
    case QdeVerdict::Both: return "Both";
    case QdeVerdict::Neither: return "Neither";
    }
    return "?";
}

std::ofstream open_output(const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw qdep::DomainError("cannot open output file '" + path + "'");
    return os;
}

// ---------------------------------------------------------------------------
// subcommand bodies
// ---------------------------------------------------------------------------

void run_surface(const FamilySpec& fam, int grid, double tol, const std::string& path) {
    Echo echo;
    echo.command = "surface";
    echo.add("family", fam.name);
    if (fam.alpha) echo.add("alpha", *fam.alpha);
    if (fam.name == "fgm") echo.add("theta", fam.theta);
    echo.add("grid", static_cast<long long>(grid));
    echo.add("tol", tol);
    echo.add("out", path);

    const SignGrid sg = sign_surface(make_family(fam), grid, tol);
    auto os = open_output(path);
    if (path.size() >= 4 && path.substr(path.size() - 4) == ".pgm") {
        os << "P2\n" << "# " << echo.command_line() << " | version " << kVersion << "\n";
        // write_pgm repeats the dimensions line after the comment
        std::ostringstream body;
        sg.write_pgm(body);
        const std::string s = body.str();
        os << s.substr(3); // drop the "P2\n" already written
    } else if (path.size() >= 4 && path.substr(path.size() - 4) == ".csv") {
        os << echo.header_line();
        sg.write_csv(os);
    } else {
        throw CLI::ValidationError("--out must end in .csv or .pgm");
    }
}

void run_qde_curve(const FamilySpec& fam, int points, const std::string& path) {
    Echo echo;
    echo.command = "qde-curve";
    echo.add("family", fam.name);
    if (fam.alpha) echo.add("alpha", *fam.alpha);
    if (fam.name == "fgm") echo.add("theta", fam.theta);
    echo.add("points", static_cast<long long>(points));
    echo.add("out", path);

    const Copula c = make_family(fam);
    auto os = open_output(path);
    os << echo.header_line() << "v,curve\n";
    for (int i = 0; i < points; ++i) {
        const double v = points == 1 ? 0.0 : static_cast<double>(i) / (points - 1);
        os << fmt(v) << ',' << fmt(qde_curve_value(c, v)) << '\n';
    }
}

void run_classify(const FamilySpec& fam, int grid, double tol, std::ostream& out) {
    Echo echo;
    echo.command = "classify";
    echo.add("family", fam.name);
    if (fam.alpha) echo.add("alpha", *fam.alpha);
    if (fam.name == "fgm") echo.add("theta", fam.theta);
    echo.add("grid", static_cast<long long>(grid));
    echo.add("tol", tol);

    const Copula c = make_family(fam);
    const QDClassification qd = classify_qd(c, grid, tol);
    const QDEClassification qde = classify_qde(c, std::max(3, grid), tol);

    json j = json_skeleton(echo);
    json jqd;
    jqd["verdict"] = verdict_name(qd.verdict);
    jqd["max_above"] = qd.max_above;
    jqd["max_below"] = qd.max_below;
    jqd["marginal"] = qd.marginal;
    if (qd.witness_pos) jqd["witness_pos"] = {qd.witness_pos->first, qd.witness_pos->second};
    if (qd.witness_neg) jqd["witness_neg"] = {qd.witness_neg->first, qd.witness_neg->second};
    j["qd"] = jqd;

    json jqde;
    jqde["verdict"] = verdict_name(qde.verdict);
    jqde["max_curve"] = qde.max_curve;
    jqde["min_curve"] = qde.min_curve;
    jqde["marginal"] = qde.marginal;
    if (qde.witness_pos) jqde["witness_pos"] = *qde.witness_pos;
    if (qde.witness_neg) jqde["witness_neg"] = *qde.witness_neg;
    j["qde"] = jqde;
    out << j.dump(2) << '\n';
}

void run_thresholds(const std::string& family, double tol, std::ostream& out) {
    Echo echo;
    echo.command = "thresholds";
    echo.add("family", family);
    echo.add("tol", tol);

    Copula c0 = Copula::frechet_lower();
    if (family == "mix:frechet") c0 = Copula::frechet_lower();
    else if (family == "mix:fgm-fu") c0 = Copula::fgm(-1.0);
    else throw CLI::ValidationError("thresholds: family must be mix:frechet or mix:fgm-fu");
    const Copula c1 = Copula::frechet_upper();

    const ThresholdReport rep = qd_qde_thresholds(c0, c1, tol);
    json j = json_skeleton(echo);
    j["m"] = rep.m;
    j["m_prime"] = rep.m_prime;
    j["M_prime"] = rep.M_prime;
    j["M"] = rep.M;
    // The QD endpoints have no closed form; they come from the bisection.
    j["numerically_derived"] = {"m", "M"};
    const auto kappa = kappa_constant(c0, c1);
    if (kappa) j["kappa"] = *kappa;
    out << j.dump(2) << '\n';
}

void run_bounds(const FamilySpec& fam, double p, const std::string& beta_spec,
                std::ostream& out) {
    Echo echo;
    echo.command = "bounds";
    echo.add("family", fam.name);
    if (fam.alpha) echo.add("alpha", *fam.alpha);
    if (fam.name == "fgm") echo.add("theta", fam.theta);
    echo.add("p", p);
    echo.add("beta", beta_spec);

    const JointModel jm{make_family(fam), Marginal::uniform_unit(), Marginal::uniform_unit()};
    const Distortion beta = make_distortion(beta_spec);
    const ExponentPair pq(p);
    const BoundReport rep = bound_report(jm, beta, pq, Box{0.0, 1.0, 0.0, 1.0});

    json j = json_skeleton(echo);
    j["exact_cov"] = rep.exact_cov;
    j["cauchy_schwarz"] = rep.cauchy_schwarz;
    j["gruss"] = rep.gruss;
    j["corr_form"] = rep.corr_form;
    j["qde_dependence"] = rep.qde_dependence;
    j["qde_factor"] = rep.qde_factor;
    j["qde_bound"] = rep.qde_bound;
    j["regression_delta"] = rep.regression_delta;
    j["regression_gamma"] = rep.regression_gamma;
    j["regression_bound"] = rep.regression_bound;
    // The correlation form mixes a model assumption into the bound.
    j["corr_form_note"] = "model-assumption-dependent (linear regression)";
    out << j.dump(2) << '\n';
}

void run_kp_table(const std::string& range, const std::string& path, std::ostream& out) {
    const auto dots = range.find("..");
    if (dots == std::string::npos)
        throw CLI::ValidationError("--p expects LO..HI, e.g. 1..10");
    const int lo = std::stoi(range.substr(0, dots));
    const int hi = std::stoi(range.substr(dots + 2));
    if (lo < 1 || hi < lo) throw CLI::ValidationError("--p range must satisfy 1 <= LO <= HI");

    Echo echo;
    echo.command = "kp-table";
    echo.add("p", range);
    if (!path.empty()) echo.add("out", path);

    std::ostringstream body;
    body << echo.header_line() << "p,x_p,K_p,bracket_lo,bracket_hi\n";
    for (int p = lo; p <= hi; ++p) {
        const ExtremalMomentResult r = solve_extremum(p);
        body << p << ',' << fmt(r.x_p, "%.20g") << ',' << fmt(r.K_p, "%.20g") << ','
             << fmt(r.bracket_lo, "%.20g") << ',' << fmt(r.bracket_hi, "%.20g") << '\n';
    }
    if (path.empty()) out << body.str();
    else open_output(path) << body.str();
}

void run_moment_bound(double a, double A, double p, std::optional<double> mu,
                      std::optional<double> mu_lo, std::optional<double> mu_hi,
                      bool unknown_mean, bool symmetric, std::ostream& out) {
    Echo echo;
    echo.command = "moment-bound";
    echo.add("a", a);
    echo.add("A", A);
    echo.add("p", p);

    MeanInfo info = MeanInfo::unknown();
    std::string kind;
    if (mu) {
        info = MeanInfo::exact(*mu);
        kind = "exact-mean";
        echo.add("mu", *mu);
    } else if (mu_lo || mu_hi) {
        if (!mu_lo || !mu_hi)
            throw CLI::ValidationError("--mu-lo and --mu-hi must be given together");
        info = MeanInfo::interval(*mu_lo, *mu_hi);
        kind = "mean-interval";
        echo.add("mu-lo", *mu_lo);
        echo.add("mu-hi", *mu_hi);
    } else if (symmetric) {
        info = MeanInfo::symmetric();
        kind = "symmetric";
        echo.add("symmetric", "");
    } else if (unknown_mean) {
        info = MeanInfo::unknown();
        kind = "unknown-mean";
        echo.add("unknown-mean", "");
    } else {
        throw CLI::ValidationError(
            "one of --mu, --mu-lo/--mu-hi, --unknown-mean, --symmetric is required");
    }

    const double bound = central_moment_bound(a, A, p, info);
    json j = json_skeleton(echo);
    j["kind"] = kind;
    j["bound"] = bound;
    if (info.kind == MeanInfo::Kind::Unknown) {
        const ExtremalMomentResult r = solve_extremum(p);
        j["x_p"] = r.x_p;
        j["K_p"] = r.K_p;
    }
    out << j.dump(2) << '\n';
}

void run_example3(double alpha, int k, std::optional<long long> seed, std::ostream& out) {
    Echo echo;
    echo.command = "example3";
    echo.add("alpha", alpha);
    echo.add("k", static_cast<long long>(k));
    if (seed) echo.add("seed", *seed);

    const PqdeConstruction pc = construct_pqde_marginal(alpha, k);
    const Copula c = Copula::gg_archimedean(alpha);
    const JointModel jm{c, Marginal::uniform_unit(), pc.marginal};

    json j = json_skeleton(echo);
    j["interval"] = {pc.v_lo, pc.v_hi};
    j["equal_probs"] = pc.equal_probs;
    j["marginal"] = {{"points", pc.marginal.points()}, {"probs", pc.marginal.probs()}};
    j["partial_sums"] = pc.partial_sums;

    json curve = json::array();
    for (double s : pc.partial_sums) curve.push_back(qde_curve_value(c, s));
    j["curve_at_partial_sums"] = curve;

    json tcov = json::array();
    bool pqde_ok = true;
    for (double y : pc.marginal.points()) {
        const double t = threshold_cov(jm, y);
        tcov.push_back(t);
        pqde_ok = pqde_ok && t >= -1e-10;
    }
    j["threshold_cov"] = tcov;
    j["pqde_verified"] = pqde_ok;

    const QDClassification qd = classify_qd(c, 200, 1e-9);
    j["qd_verdict"] = verdict_name(qd.verdict);
    if (qd.witness_pos) j["qd_witness_pos"] = {qd.witness_pos->first, qd.witness_pos->second};
    if (qd.witness_neg) j["qd_witness_neg"] = {qd.witness_neg->first, qd.witness_neg->second};

    if (seed) {
        json mc = json::array();
        const SampleSpec spec{200000, static_cast<std::uint64_t>(*seed)};
        for (std::size_t i = 0; i + 1 < pc.marginal.points().size(); ++i) {
            const double y = pc.marginal.points()[i];
            const Estimate est = estimate_threshold_cov(jm, y, spec);
            const double quad = threshold_cov(jm, y);
            json cell;
            cell["y"] = y;
            cell["estimate"] = est.value;
            cell["std_error"] = est.std_error;
            cell["quadrature"] = quad;
            cell["z"] = est.std_error > 0.0 ? (est.value - quad) / est.std_error : 0.0;
            mc.push_back(cell);
        }
        j["mc"] = mc;
    }
    out << j.dump(2) << '\n';
}

void run_mc_check(const FamilySpec& fam, const std::string& beta_spec, long long n,
                  long long seed, const std::string& dump_path, std::ostream& out) {
    Echo echo;
    echo.command = "mc-check";
    echo.add("family", fam.name);
    if (fam.alpha) echo.add("alpha", *fam.alpha);
    if (fam.name == "fgm") echo.add("theta", fam.theta);
    echo.add("beta", beta_spec);
    echo.add("n", n);
    echo.add("seed", seed);
    if (!dump_path.empty()) echo.add("dump", dump_path);
    if (n < 2) throw CLI::ValidationError("--n must be >= 2");

    const JointModel jm{make_family(fam), Marginal::uniform_unit(), Marginal::uniform_unit()};
    const Distortion beta = make_distortion(beta_spec);
    const SampleSpec spec{static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(seed)};
    const Estimate est = estimate_cov(jm, beta, spec);
    const double quad = hoeffding_cov(jm, beta);

    if (!dump_path.empty()) {
        auto os = open_output(dump_path);
        os << echo.header_line() << "x,y\n";
        for (const auto& [x, y] : sample(jm, spec))
            os << fmt(x) << ',' << fmt(y) << '\n';
    }

    json j = json_skeleton(echo);
    j["estimate"] = est.value;
    j["std_error"] = est.std_error;
    j["quadrature"] = quad;
    j["z"] = est.std_error > 0.0 ? (est.value - quad) / est.std_error : 0.0;
    out << j.dump(2) << '\n';
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Covariance bounds under quadrant dependence in expectation", "qdep"};
    app.require_subcommand(1);

    FamilySpec fam;
    int grid = 200;
    int points = 201;
    double tol = 1e-9;
    double thr_tol = 1e-8;
    double p_real = 2.0;
    std::string out_path, beta_spec = "identity", p_range, thr_family;
    double mb_a = 0.0, mb_A = 1.0, mb_p = 2.0;
    std::optional<double> mb_mu, mb_mu_lo, mb_mu_hi;
    bool mb_unknown = false, mb_symmetric = false;
    int e3_k = 2;
    double e3_alpha = 0.7;
    std::optional<long long> e3_seed;
    long long mc_n = 100000, mc_seed = 0;

    auto add_family = [&](CLI::App* cmd, bool with_alpha = true) {
        cmd->add_option("--family", fam.name, "copula family")->required();
        if (with_alpha) cmd->add_option("--alpha", fam.alpha, "family/mixture parameter");
        cmd->add_option("--theta", fam.theta, "FGM parameter (default -1)");
    };

    CLI::App* surface = app.add_subcommand("surface", "sign(C - uv) grid to CSV or PGM");
    add_family(surface);
    surface->add_option("--grid", grid, "lattice subdivisions")->required();
    surface->add_option("--tol", tol, "zero-band tolerance");
    surface->add_option("--out", out_path, "output path (.csv or .pgm)")->required();

    CLI::App* curve = app.add_subcommand("qde-curve", "QDE curve samples to CSV");
    add_family(curve);
    curve->add_option("--points", points, "number of v samples")->required();
    curve->add_option("--out", out_path, "output path (.csv)")->required();

    CLI::App* classify = app.add_subcommand("classify", "QD/QDE classification as JSON");
    add_family(classify);
    classify->add_option("--grid", grid, "lattice subdivisions");
    classify->add_option("--tol", tol, "classification tolerance");

    CLI::App* thresholds = app.add_subcommand("thresholds", "mixture-weight thresholds as JSON");
    thresholds->add_option("--family", thr_family, "mix:frechet or mix:fgm-fu")->required();
    thresholds->add_option("--tol", thr_tol, "bisection tolerance");

    CLI::App* bounds = app.add_subcommand("bounds", "covariance bound report as JSON");
    add_family(bounds);
    bounds->add_option("--p", p_real, "Holder exponent")->required();
    bounds->add_option("--beta", beta_spec, "identity | power:K")->required();

    CLI::App* kp = app.add_subcommand("kp-table", "x_p and K_p table as CSV");
    kp->add_option("--p", p_range, "integer range LO..HI")->required();
    kp->add_option("--out", out_path, "output path (stdout when omitted)");

    CLI::App* mb = app.add_subcommand("moment-bound", "central-moment bound as JSON");
    mb->add_option("--a", mb_a, "support lower end")->required();
    mb->add_option("--A", mb_A, "support upper end")->required();
    mb->add_option("--p", mb_p, "moment order")->required();
    mb->add_option("--mu", mb_mu, "exact mean");
    mb->add_option("--mu-lo", mb_mu_lo, "mean interval lower end");
    mb->add_option("--mu-hi", mb_mu_hi, "mean interval upper end");
    mb->add_flag("--unknown-mean", mb_unknown, "no mean information");
    mb->add_flag("--symmetric", mb_symmetric, "symmetric law");

    CLI::App* e3 = app.add_subcommand("example3", "PQDE-but-not-QD construction as JSON");
    e3->add_option("--alpha", e3_alpha, "Archimedean parameter")->required();
    e3->add_option("--k", e3_k, "number of atoms")->required();
    e3->add_option("--seed", e3_seed, "enable MC confirmation with this seed");

    CLI::App* mc = app.add_subcommand("mc-check", "Monte Carlo vs quadrature as JSON");
    add_family(mc);
    mc->add_option("--beta", beta_spec, "identity | power:K")->required();
    mc->add_option("--n", mc_n, "sample size")->required();
    mc->add_option("--seed", mc_seed, "RNG seed")->required();
    std::string mc_dump;
    mc->add_option("--dump", mc_dump, "write the sample pairs to this CSV");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << '\n';
        return 2;
    }

    try {
        if (*surface) run_surface(fam, grid, tol, out_path);
        else if (*curve) run_qde_curve(fam, points, out_path);
        else if (*classify) run_classify(fam, grid, tol, out);
        else if (*thresholds) run_thresholds(thr_family, thr_tol, out);
        else if (*bounds) run_bounds(fam, p_real, beta_spec, out);
        else if (*kp) run_kp_table(p_range, out_path, out);
        else if (*mb)
            run_moment_bound(mb_a, mb_A, mb_p, mb_mu, mb_mu_lo, mb_mu_hi, mb_unknown,
                             mb_symmetric, out);
        else if (*e3) run_example3(e3_alpha, e3_k, e3_seed, out);
        else if (*mc) run_mc_check(fam, beta_spec, mc_n, mc_seed, mc_dump, out);
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

} // namespace qdep::cli
