#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "plaq/acceptance.hpp"
#include "plaq/correlators.hpp"
#include "plaq/cycles.hpp"
#include "plaq/emit.hpp"
#include <iostream>
#include "plaq/gibbs.hpp"
#include "plaq/lengths.hpp"
#include "plaq/magnetization.hpp"
#include "plaq/mcmc.hpp"
#include "plaq/parallel.hpp"
#include "plaq/renorm.hpp"
#include "plaq/screening.hpp"
#include "plaq/shadows.hpp"

using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

plaq::ModelSpec parse_model(const std::string& name) {
    if (name == "spm") return plaq::ModelSpec::spm();
    if (name == "tpm") return plaq::ModelSpec::tpm();
    if (name.rfind("rect", 0) == 0) {
        auto x = name.find('x');
        if (x != std::string::npos) {
            int a = std::atoi(name.c_str() + 4);
            int b = std::atoi(name.c_str() + x + 1);
            return plaq::ModelSpec::rect(a, b);
        }
    }
    throw UsageError("unknown model '" + name + "' (expected spm, tpm or rectAxB)");
}

std::vector<plaq::Site> parse_sites(const std::string& text) {
    json j = json::parse(text);
    if (!j.is_array()) throw UsageError("sites must be a JSON array of [x,y] pairs");
    std::vector<plaq::Site> out;
    for (const auto& e : j) {
        if (!e.is_array() || e.size() != 2) throw UsageError("each site must be an [x,y] pair");
        out.push_back({e.at(0).get<int32_t>(), e.at(1).get<int32_t>()});
    }
    return out;
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
    if (out.empty()) throw UsageError("empty numeric list");
    return out;
}

// Versioned run configuration: {"schema": 1, "<flag>": value, ...}. Unknown
// keys are rejected; command-line flags override file values.
json load_config(const std::string& path, const std::set<std::string>& known) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw UsageError(std::string("malformed config: ") + e.what());
    }
    if (!j.is_object()) throw UsageError("config must be a JSON object");
    if (!j.contains("schema") || !j["schema"].is_number_integer() || j["schema"].get<int>() != 1)
        throw UsageError("config requires \"schema\": 1");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (it.key() != "schema" && !known.count(it.key()))
            throw UsageError("unknown config key: " + it.key());
    return j;
}

std::string bases_to_json(const std::vector<plaq::Site>& bases) {
    json arr = json::array();
    for (plaq::Site b : bases) arr.push_back({b.x, b.y});
    return arr.dump();
}

int cmd_multispin(const std::string& model_name, double beta, const std::string& sites,
                  bool finite, int ell, const std::string& method, bool emit_json, bool emit_csv) {
    plaq::ModelSpec model = parse_model(model_name);
    auto A = parse_sites(sites);
    json out;
    out["model"] = model_name;
    out["beta"] = beta;
    if (!finite) {
        auto r = plaq::multispin_infinite(model, A, beta);
        out["equivalent"] = r.equivalent;
        out["n"] = r.n;
        out["value"] = r.value;
        if (emit_csv) {
            plaq::write_csv_header(std::cout);
            plaq::write_csv_row(std::cout, {model_name, "infinite", beta, "-", "multispin", r.value,
                                            "exact"});
            return kExitOk;
        }
        if (!emit_json) {
            if (r.equivalent)
                std::printf("mu([sigma]_A) = %.17g   n(A) = %lld\n", r.value, (long long)r.n);
            else
                std::printf("mu([sigma]_A) = 0   (A is not a plaquette sum)\n");
        }
    } else {
        plaq::Region box = plaq::Region::centered_square(ell);
        auto m = method == "enumeration" ? plaq::FiniteMethod::enumeration
                                         : plaq::FiniteMethod::cycle_expansion;
        auto r = plaq::multispin_plus_finite(model, box, A, beta, m);
        out["value"] = r.value;
        out["n"] = r.n_alpha;
        out["plus_bound"] = r.plus_lower_bound;
        if (emit_csv) {
            plaq::write_csv_header(std::cout);
            plaq::write_csv_row(std::cout, {model_name, "centered-square:" + std::to_string(ell),
                                            beta, "all-plus", "multispin", r.value, "exact"});
            return kExitOk;
        }
        if (!emit_json)
            std::printf("mu^+_L([sigma]_A) = %.17g   n(A) = %lld   lower bound tanh^n = %.17g\n",
                        r.value, (long long)r.n_alpha, r.plus_lower_bound);
    }
    if (emit_json) std::printf("%s\n", out.dump(2).c_str());
    return kExitOk;
}

int cmd_decompose(const std::string& model_name, const std::string& sites, bool emit_json) {
    plaq::ModelSpec model = parse_model(model_name);
    auto A = parse_sites(sites);
    auto dec = plaq::minimal_decomposition(model, A);
    json out;
    out["model"] = model_name;
    out["equivalent"] = dec.has_value();
    if (dec) {
        out["n"] = dec->size();
        out["bases"] = json::parse(bases_to_json(dec->bases));
    }
    if (emit_json) {
        std::printf("%s\n", out.dump(2).c_str());
    } else if (dec) {
        std::printf("A ~ empty: yes   n(A) = %zu\nbases: %s\n", dec->size(),
                    bases_to_json(dec->bases).c_str());
    } else {
        std::printf("A ~ empty: no\n");
    }
    return kExitOk;
}

int cmd_renorm_check(const std::string& model_name, int ell, int n, int N, double beta, double tol,
                     bool emit_json) {
    plaq::ModelSpec model = parse_model(model_name);
    plaq::DecimationReport rep;
    if (model.kind == plaq::Model::SPM)
        rep = plaq::decimation_check(model, ell, N, beta);
    else
        rep = plaq::decimation_check(model, n, N, beta);
    json out;
    out["beta"] = rep.beta;
    out["beta_prime"] = rep.beta_prime;
    out["max_discrepancy"] = rep.max_discrepancy;
    out["pass"] = rep.pass(tol);
    if (emit_json)
        std::printf("%s\n", out.dump(2).c_str());
    else
        std::printf("beta' = %.17g   max discrepancy %.3e   %s\n", rep.beta_prime,
                    rep.max_discrepancy, rep.pass(tol) ? "PASS" : "FAIL");
    return rep.pass(tol) ? kExitOk : kExitCheckFailed;
}

int cmd_magnetization(int ell, double beta, bool scan, int ell_max, double threshold, bool emit_json) {
    if (!scan) {
        auto r = plaq::magnetization_plus_exact(ell, beta);
        if (emit_json) {
            json out = {{"ell", r.ell}, {"beta", r.beta}, {"value", r.value},
                        {"log_num", r.log_num}, {"log_den", r.log_den}};
            std::printf("%s\n", out.dump(2).c_str());
        } else {
            std::printf("mu^+(sigma_0) = %.17g  (ell=%d, beta=%g)\n", r.value, ell, beta);
        }
        return kExitOk;
    }
    std::vector<int64_t> ells;
    for (int64_t l = std::max(1, ell); l <= ell_max; l = std::max(l + 1, (l * 5) / 4)) ells.push_back(l);
    auto s = plaq::magnetization_decay_scan(beta, ells, threshold);
    std::printf("beta,ell,value\n");
    for (const auto& row : s.rows) std::printf("%.17g,%lld,%.17g\n", beta, (long long)row.ell, row.value);
    if (s.crossover)
        std::fprintf(stderr, "crossover: value < %g first at ell = %lld\n", threshold,
                     (long long)*s.crossover);
    else
        std::fprintf(stderr, "no crossover below threshold %g in the scanned range\n", threshold);
    return kExitOk;
}

int cmd_lengths(const std::string& model_name, const std::string& betas_text,
                const std::string& plotdata, int R) {
    plaq::ModelSpec model = parse_model(model_name);
    auto betas = parse_list(betas_text);
    plaq::CavityOptions copt;
    copt.R = R;
    auto rows = plaq::ordering_report(model, betas, copt);
    std::printf("beta,kind,lo,hi,flag\n");
    auto flag = [](plaq::Certainty c) {
        return c == plaq::Certainty::exact ? "exact"
               : c == plaq::Certainty::bracket ? "bracket"
                                               : "lower-bound";
    };
    for (const auto& r : rows) {
        std::printf("%.17g,multispin,%lld,%lld,%s\n", r.beta, (long long)r.multispin.lo,
                    (long long)r.multispin.hi, flag(r.multispin.certainty));
        std::printf("%.17g,cavity,%lld,%lld,%s\n", r.beta, (long long)r.cavity.lo,
                    (long long)r.cavity.hi, flag(r.cavity.certainty));
        std::printf("%.17g,mix,%lld,%lld,%s\n", r.beta, (long long)r.mix.lo, (long long)r.mix.hi,
                    flag(r.mix.certainty));
        std::printf("%.17g,renorm,%lld,%lld,exact\n", r.beta, (long long)r.renorm, (long long)r.renorm);
    }
    if (!plotdata.empty()) {
        std::ofstream out(plotdata);
        if (!out) throw UsageError("cannot open " + plotdata);
        out << "beta,ln_ell_multispin_lo,ln_ell_renorm\n";
        for (double b = 6; b <= 20 + 1e-9; b += 0.25) {
            out << b << ',' << std::log(double(plaq::ell_multispin(model, b).lo)) << ','
                << std::log(double(plaq::renorm_length(model, b))) << '\n';
        }
        double ms = plaq::multispin_slope(model, 6, 20, 0.25);
        double rs = plaq::renorm_slope(model, 6, 20, 0.25);
        out << "# fitted slopes: multispin " << ms << " renorm " << rs << "\n";
        std::fprintf(stderr, "fitted slopes: multispin %.4f renorm %.4f (written to %s)\n", ms, rs,
                     plotdata.c_str());
    }
    return kExitOk;
}

int cmd_mcmc_validate(const std::string& config_path, const std::string& series_path) {
    static const std::set<std::string> known = {
        "model", "width", "height", "torus", "beta", "bc", "dynamics", "seed",
        "chain_id", "sweeps", "burnin", "thin", "observable", "sites", "margin"};
    json cfg = load_config(config_path, known);
    if (!cfg.contains("seed")) throw UsageError("mcmc-validate config requires an explicit seed");

    plaq::ChainSpec cs;
    cs.model = parse_model(cfg.value("model", "spm"));
    cs.width = cfg.value("width", 16);
    cs.height = cfg.value("height", 16);
    cs.torus = cfg.value("torus", false);
    cs.beta = cfg.value("beta", 1.0);
    std::string bc = cfg.value("bc", "all-plus");
    if (bc == "all-plus")
        cs.bc = plaq::BoundaryCondition::all_plus();
    else if (bc == "all-minus")
        cs.bc = plaq::BoundaryCondition::all_minus();
    else if (bc == "free")
        cs.bc = plaq::BoundaryCondition::free_bc();
    else
        throw UsageError("unknown bc: " + bc);
    std::string dyn = cfg.value("dynamics", "heat-bath");
    cs.dynamics = dyn == "metropolis" ? plaq::Dynamics::metropolis : plaq::Dynamics::heat_bath;
    cs.seed = cfg["seed"].get<uint64_t>();
    cs.chain_id = cfg.value("chain_id", 0);
    cs.sweeps = cfg.value("sweeps", int64_t(2000));
    cs.burnin = cfg.value("burnin", int64_t(500));
    cs.thin = cfg.value("thin", int64_t(1));

    std::vector<plaq::McObservable> obs;
    std::vector<std::string> names;
    std::string kind = cfg.value("observable", "defect-density");
    if (kind == "defect-density") {
        obs.push_back(plaq::mc_defect_density_observable(cfg.value("margin", 2)));
        names.push_back("defect_density");
    } else if (kind == "multispin") {
        obs.push_back(plaq::mc_product_observable(parse_sites(cfg.at("sites").dump())));
        names.push_back("multispin");
    } else if (kind == "site") {
        auto sites = parse_sites(cfg.at("sites").dump());
        obs.push_back(plaq::mc_site_observable(sites.at(0)));
        names.push_back("site");
    } else {
        throw UsageError("unknown observable: " + kind);
    }

    auto res = plaq::run_chain(cs, obs);
    if (res.low_temp_warning)
        std::fprintf(stderr,
                     "warning: beta=%g is above the validation range (relaxation times grow like "
                     "e^beta); estimates may be unreliable\n",
                     cs.beta);

    if (!series_path.empty()) {
        std::ofstream out(series_path);
        if (!out) throw UsageError("cannot open " + series_path);
        out << "index";
        for (const auto& n : names) out << ',' << n;
        out << '\n';
        for (size_t i = 0; i < res.series[0].size(); ++i) {
            out << i;
            for (const auto& s : res.series) out << ',' << s[i];
            out << '\n';
        }
    }
    json summary;
    summary["low_temp_warning"] = res.low_temp_warning;
    for (size_t i = 0; i < names.size(); ++i) {
        summary[names[i]] = {{"mean", res.stats[i].mean},
                             {"se", res.stats[i].se},
                             {"samples", res.stats[i].n},
                             {"batches", res.stats[i].batches}};
    }
    std::printf("%s\n", summary.dump(2).c_str());
    return kExitOk;
}

int cmd_cycles_audit(const std::string& model_name, int n_max, const std::string& ts) {
    plaq::ModelSpec model = parse_model(model_name);
    auto tlist = parse_list(ts);
    json report;
    report["model"] = model_name;
    json checks = json::array();
    bool all_ok = true;
    int n_lo = model.kind == plaq::Model::SPM ? 1 : 0;
    for (int n = n_lo; n <= n_max; ++n) {
        plaq::CycleBasis b = model.kind == plaq::Model::SPM ? plaq::spm_stripe_basis(n)
                                                            : plaq::tpm_pascal_basis(n);
        if (n == n_max) {
            report["basis"] = b.provenance;
            report["rank"] = b.rank;
            report["relations"] = b.relations;
        }
        for (double t : tlist) {
            double lhs = plaq::weighted_cycle_sum(b, t, true);
            double rhs = plaq::cycle_sum_bound(n, t);
            bool ok = lhs <= rhs * (1 + 1e-12);
            all_ok &= ok;
            checks.push_back({{"n", n}, {"t", t}, {"lhs", lhs}, {"rhs", rhs}, {"ok", ok}});
        }
    }
    report["bound_checks"] = checks;
    std::printf("%s\n", report.dump(2).c_str());
    return all_ok ? kExitOk : kExitCheckFailed;
}

int cmd_screening(const std::string& model_name, int n, double beta, bool emit_json, bool emit_csv) {
    plaq::ModelSpec model = parse_model(model_name);
    auto r = plaq::screening_ratio(model, n, beta);
    if (emit_csv) {
        plaq::write_csv_header(std::cout);
        plaq::write_csv_row(std::cout, {model_name, "screening-block:" + std::to_string(n), beta,
                                        "sup", "z-ratio", r.ratio,
                                        r.exact ? "exact" : "lower-bound"});
        return r.ratio <= r.bound ? kExitOk : kExitCheckFailed;
    }
    json out = {{"model", model_name},
                {"n", n},
                {"beta", beta},
                {"ratio", r.ratio},
                {"bound", r.bound},
                {"exact", r.exact},
                {"bound_applicable", r.bound_applicable},
                {"ok", r.ratio <= r.bound}};
    if (emit_json)
        std::printf("%s\n", out.dump(2).c_str());
    else
        std::printf("ratio %.17g  bound %.17g  [%s, %s]\n", r.ratio, r.bound,
                    r.exact ? "exhaustive" : "family lower bound",
                    r.ratio <= r.bound ? "ok" : "EXCEEDS BOUND");
    return r.ratio <= r.bound ? kExitOk : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact and stochastic analysis of square/triangular plaquette models"};
    app.require_subcommand(1);
    int threads = 0;
    app.add_option("--threads", threads, "worker thread cap (0 = all cores)");

    // multispin
    auto* ms = app.add_subcommand("multispin", "infinite- or finite-volume multispin average");
    std::string ms_model = "spm", ms_sites, ms_method = "expansion";
    double ms_beta = 1.0;
    bool ms_finite = false, ms_json = false, ms_csv = false;
    int ms_ell = 2;
    ms->add_option("--model", ms_model);
    ms->add_option("--beta", ms_beta);
    ms->add_option("--sites", ms_sites, "JSON array of [x,y]")->required();
    ms->add_flag("--finite", ms_finite, "plus-boundary finite box [-ell,ell]^2");
    ms->add_option("--ell", ms_ell);
    ms->add_option("--method", ms_method, "expansion | enumeration");
    ms->add_flag("--json", ms_json);
    ms->add_flag("--csv", ms_csv);

    // decompose
    auto* dc = app.add_subcommand("decompose", "minimal plaquette decomposition of a site set");
    std::string dc_model = "spm", dc_sites;
    bool dc_json = false;
    dc->add_option("--model", dc_model);
    dc->add_option("--sites", dc_sites)->required();
    dc->add_flag("--json", dc_json);

    // renorm-check
    auto* rc = app.add_subcommand("renorm-check", "exact decimation identity check");
    std::string rc_model = "spm";
    int rc_ell = 2, rc_n = 1, rc_N = 1;
    double rc_beta = 1.0, rc_tol = 1e-10;
    bool rc_json = false;
    rc->add_option("--model", rc_model);
    rc->add_option("--ell", rc_ell, "SPM decimation step");
    rc->add_option("--n", rc_n, "TPM decimation exponent (step 2^n)");
    rc->add_option("--N", rc_N);
    rc->add_option("--beta", rc_beta);
    rc->add_option("--tol", rc_tol);
    rc->add_flag("--json", rc_json);

    // magnetization
    auto* mg = app.add_subcommand("magnetization", "exact plus-boundary magnetization (SPM)");
    int mg_ell = 1, mg_ell_max = 256;
    double mg_beta = 1.0, mg_threshold = 0.2;
    bool mg_scan = false, mg_json = false;
    mg->add_option("--ell", mg_ell);
    mg->add_option("--beta", mg_beta);
    mg->add_flag("--scan", mg_scan, "emit CSV over an ell grid");
    mg->add_option("--ell-max", mg_ell_max);
    mg->add_option("--threshold", mg_threshold);
    mg->add_flag("--json", mg_json);

    // lengths
    auto* lg = app.add_subcommand("lengths", "desk-scale length estimates and ordering table");
    std::string lg_model = "spm", lg_betas = "0.5,1,1.5", lg_plot;
    int lg_R = 3;
    lg->add_option("--model", lg_model);
    lg->add_option("--betas", lg_betas, "comma-separated");
    lg->add_option("--R", lg_R, "cavity box side in units of ell");
    lg->add_option("--emit-plotdata", lg_plot, "write ln(ell) vs beta series and slopes");

    // mcmc-validate
    auto* mv = app.add_subcommand("mcmc-validate", "seeded sampler run from a JSON spec");
    std::string mv_config, mv_series;
    mv->add_option("--config", mv_config, "JSON chain spec")->required();
    mv->add_option("--series", mv_series, "CSV time-series output path");

    // cycles-audit
    auto* ca = app.add_subcommand("cycles-audit", "cycle bases, ranks and cycle-sum bounds");
    std::string ca_model = "tpm", ca_t = "0.1,0.5,0.9";
    int ca_nmax = 10;
    ca->add_option("--model", ca_model);
    ca->add_option("--n-max", ca_nmax);
    ca->add_option("--t", ca_t);

    // screening
    auto* sc = app.add_subcommand("screening", "partition-function ratio vs its bound");
    std::string sc_model = "spm";
    int sc_n = 2;
    double sc_beta = 1.0;
    bool sc_json = false, sc_csv = false;
    sc->add_option("--model", sc_model);
    sc->add_option("--n", sc_n);
    sc->add_option("--beta", sc_beta);
    sc->add_flag("--json", sc_json);
    sc->add_flag("--csv", sc_csv);

    // verify-all
    auto* va = app.add_subcommand("verify-all", "run the full verification suite");
    bool va_quick = false;
    va->add_flag("--quick", va_quick, "shorter Monte Carlo chains");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    plaq::set_thread_cap(threads);
    try {
        if (ms->parsed())
            return cmd_multispin(ms_model, ms_beta, ms_sites, ms_finite, ms_ell, ms_method, ms_json, ms_csv);
        if (dc->parsed()) return cmd_decompose(dc_model, dc_sites, dc_json);
        if (rc->parsed())
            return cmd_renorm_check(rc_model, rc_ell, rc_n, rc_N, rc_beta, rc_tol, rc_json);
        if (mg->parsed())
            return cmd_magnetization(mg_ell, mg_beta, mg_scan, mg_ell_max, mg_threshold, mg_json);
        if (lg->parsed()) return cmd_lengths(lg_model, lg_betas, lg_plot, lg_R);
        if (mv->parsed()) return cmd_mcmc_validate(mv_config, mv_series);
        if (ca->parsed()) return cmd_cycles_audit(ca_model, ca_nmax, ca_t);
        if (sc->parsed()) return cmd_screening(sc_model, sc_n, sc_beta, sc_json, sc_csv);
        if (va->parsed()) return plaq::acceptance_main(va_quick);
    } catch (const UsageError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    }
    return kExitUsage;
}
