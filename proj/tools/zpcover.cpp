// zpcover: construct, verify and export S-covering families over Z_p,
// together with their downstream artifacts (coloring certificates,
// partition-matroid exports, prophet-gap reports, bound tables).
//
// Exit codes: 0 = success and all verifications passed, 1 = usage or parse
// error, 2 = a verification failed (the report is printed).

#include "CLI11.hpp"

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include "zpcover/json_io.hpp"

namespace {

using namespace zpcover;

struct RunConfig {
    std::uint64_t seed = 0;
    int threads = static_cast<int>(std::thread::hardware_concurrency());
    std::uint64_t budget = std::uint64_t{1} << 30;
    std::string format = "text";
    bool json() const { return format == "json"; }
};

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

void print_report_text(const CoverageReport& rep, const std::string& what) {
    std::cout << what << ": " << (rep.is_covering ? "covering" : "NOT covering")
              << "  pairs=" << rep.checked_pairs
              << "  elapsed=" << fmt_double(rep.elapsed_seconds) << "s\n";
    if (rep.first_failure) {
        std::cout << "  first failure: ordered pair (" << rep.first_failure->v_index << ", "
                  << rep.first_failure->w_index << ") misses "
                  << rep.first_failure->missing << "\n";
    }
}

void write_json_file(const std::string& path, const nlohmann::json& j) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path);
    os << j.dump(2) << "\n";
}

int finish_family_write(const RunConfig& cfg, const CoveringFamily& fam,
                        const CoverageReport& rep, const std::string& what,
                        const std::string& out, const nlohmann::json& stats) {
    if (!rep.is_covering) {
        if (cfg.json())
            std::cout << nlohmann::json{{"verified", false}, {"report", rep}}.dump(2) << "\n";
        else
            print_report_text(rep, what);
        return 2;
    }
    write_family(fam, out);
    write_json_file(out + ".json", stats);
    if (cfg.json()) {
        nlohmann::json j{{"verified", true},
                         {"out", out},
                         {"stats", out + ".json"},
                         {"p", fam.modulus()},
                         {"ell", fam.length()},
                         {"n", fam.size()}};
        std::cout << j.dump(2) << "\n";
    } else {
        print_report_text(rep, what);
        std::cout << "wrote " << out << " (p=" << fam.modulus() << " l=" << fam.length()
                  << " n=" << fam.size() << "), stats in " << out << ".json\n";
    }
    return 0;
}

CoverSet cover_from_spec(const std::string& spec, const CoveringFamily& fam) {
    if (spec.empty()) {
        if (!fam.claimed_cover())
            throw std::invalid_argument("family claims no cover set; pass --s");
        return *fam.claimed_cover();
    }
    if (spec == "none") throw std::invalid_argument("--s none leaves nothing to verify");
    return CoverSet::parse(spec, fam.modulus());
}

}  // namespace

int main(int argc, char** argv) {
    RunConfig cfg;
    CLI::App app{"S-covering families over Z_p: constructions, verification, exports"};
    app.require_subcommand(1);
    app.fallthrough();
    app.add_option("--seed", cfg.seed, "RNG seed (default 0)");
    app.add_option("--threads", cfg.threads, "verifier worker threads");
    app.add_option("--budget", cfg.budget, "memory budget in bytes (default 1 GiB)");
    app.add_option("--format", cfg.format, "output format: text or json")
        ->check(CLI::IsMember({"text", "json"}));

    // ----- construct -----------------------------------------------------
    auto* construct = app.add_subcommand("construct", "build a family and write a zpcf file");
    construct->require_subcommand(1);

    struct {
        int p = 0;
        long long n = 0;
        std::string out;
    } cb;
    auto* c_base = construct->add_subcommand("base-p", "base-p digit construction");
    c_base->add_option("--p", cb.p, "prime modulus")->required();
    c_base->add_option("--n", cb.n, "family size")->required();
    c_base->add_option("--out", cb.out, "output zpcf path")->required();

    struct {
        int p = 0;
        long long n = 0;
        int k = 0;
        std::string base = "base-p";
        std::string out;
    } cp;
    auto* c_pipe = construct->add_subcommand("pipeline", "three-stage Z_p-covering pipeline");
    c_pipe->add_option("--p", cp.p, "prime modulus (>= 5)")->required();
    c_pipe->add_option("--n", cp.n, "family size")->required();
    c_pipe->add_option("--k", cp.k, "intermediate prime (default: selected)");
    c_pipe->add_option("--base", cp.base, "F1 source: base-p or aa")
        ->check(CLI::IsMember({"base-p", "aa"}));
    c_pipe->add_option("--out", cp.out, "output zpcf path")->required();

    struct {
        int p = 0;
        int ell0 = 0;
        int m = 2;
        int zmax = 0;
        std::string mode = "exhaustive";
        std::string out;
    } ca;
    auto* c_aa = construct->add_subcommand("aa", "balanced-word iteration");
    c_aa->add_option("--p", ca.p, "odd prime modulus")->required();
    c_aa->add_option("--ell0", ca.ell0, "base length (multiple of p-1)")->required();
    c_aa->add_option("--m", ca.m, "walk length parameter (>= 2)");
    c_aa->add_option("--zmax", ca.zmax, "iterations (S_z doubles each step)")->required();
    c_aa->add_option("--mode", ca.mode, "star partition mode")
        ->check(CLI::IsMember({"exhaustive", "sampled"}));
    c_aa->add_option("--out", ca.out, "output zpcf path")->required();

    // ----- verify ---------------------------------------------------------
    struct {
        std::string family;
        std::string s;
    } vf;
    auto* verify = app.add_subcommand("verify", "exhaustively check S-covering");
    verify->add_option("--family", vf.family, "zpcf path")->required();
    verify->add_option("--s", vf.s, "cover set: Zp, Zp*, or comma list (default: claimed)");

    // ----- lift -----------------------------------------------------------
    struct {
        std::string family;
        int p = 0;
        bool minimal = false;
        std::string out;
    } lf;
    auto* lift = app.add_subcommand("lift", "bit-lift a Z_k-covering family to modulus p");
    lift->add_option("--family", lf.family, "source zpcf (modulus k)")->required();
    lift->add_option("--p", lf.p, "target prime (2k <= p)")->required();
    lift->add_flag("--minimal", lf.minimal, "emit ceil(log2 k)+1 copies instead of 2*ceil(log2 k)");
    lift->add_option("--out", lf.out, "output zpcf path")->required();

    // ----- scale-set --------------------------------------------------------
    struct {
        int p = 0;
        int k = 0;
        std::string out;
    } ss;
    auto* scale_set = app.add_subcommand("scale-set", "find a scaling set for (p, k)");
    scale_set->add_option("--p", ss.p, "prime modulus")->required();
    scale_set->add_option("--k", ss.k, "difference range size")->required();
    scale_set->add_option("--out", ss.out, "write JSON here (default: stdout)");

    // ----- boost ------------------------------------------------------------
    struct {
        std::string family;
        int concat = 0;
        int scale = 0;
        std::string out;
    } bo;
    auto* boost = app.add_subcommand("boost", "concat or scale boost");
    boost->add_option("--family", bo.family, "zpcf path")->required();
    auto* opt_concat = boost->add_option("--concat", bo.concat, "z-fold concatenation");
    auto* opt_scale = boost->add_option("--scale", bo.scale, "append s-scaled copy");
    opt_concat->excludes(opt_scale);
    boost->add_option("--out", bo.out, "output zpcf path")->required();

    // ----- certify ------------------------------------------------------------
    struct {
        std::string family;
        int r = 0;
        std::string out;
    } cf;
    auto* certify = app.add_subcommand("certify", "product-dimension coloring certificate");
    certify->add_option("--family", cf.family, "Z_p-covering zpcf")->required();
    certify->add_option("--r", cf.r, "number of cliques (<= family size)")->required();
    certify->add_option("--out", cf.out, "certificate JSON path")->required();

    // ----- matroids --------------------------------------------------------------
    struct {
        std::string cert;
        std::string check = "auto";
        std::string out;
    } mt;
    auto* matroids = app.add_subcommand("matroids", "partition-matroid export");
    matroids->add_option("--cert", mt.cert, "certificate JSON path")->required();
    matroids->add_option("--check", mt.check, "intersection check: auto, exhaustive, sampled, none")
        ->check(CLI::IsMember({"auto", "exhaustive", "sampled", "none"}));
    matroids->add_option("--out", mt.out, "matroid JSON path")->required();

    // ----- prophet ----------------------------------------------------------------
    struct {
        int p = 0;
        int r = 0;
        long long mc = 0;
        std::string out;
    } pr;
    auto* prophet = app.add_subcommand("prophet", "prophet vs optimal gambler gap");
    prophet->add_option("--p", pr.p, "clique size (>= 2)")->required();
    prophet->add_option("--r", pr.r, "number of cliques")->required();
    prophet->add_option("--mc", pr.mc, "Monte Carlo samples (0 = exact only)");
    prophet->add_option("--out", pr.out, "write ValueReport JSON here");

    // ----- bounds ------------------------------------------------------------------
    struct {
        int p = 0;
        double log2n = 0.0;
        std::string out;
    } bd;
    auto* bounds = app.add_subcommand("bounds", "AAM(p, N) bound table");
    bounds->add_option("--p", bd.p, "odd prime")->required();
    bounds->add_option("--log2n", bd.log2n, "log2 of the family size")->required();
    bounds->add_option("--out", bd.out, "write BoundReport JSON here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    memory_budget() = cfg.budget;
    if (cfg.threads < 1) cfg.threads = 1;

    try {
        if (c_base->parsed()) {
            CoveringFamily fam = base_p_family(PrimeModulus(cb.p), cb.n);
            CoverageReport rep = is_covering(fam, CoverSet::all(cb.p), cfg.threads);
            nlohmann::json stats{{"construction", "base_p"}, {"p", cb.p},   {"N", cb.n},
                                 {"ell", fam.length()},      {"s", "Zp"},   {"report", rep}};
            return finish_family_write(cfg, fam, rep, "base-p family", cb.out, stats);
        }
        if (c_pipe->parsed()) {
            PipelineBase base =
                cp.base == "aa" ? PipelineBase::alon_alweiss : PipelineBase::base_p;
            PipelineResult res =
                build_upperbound_family(PrimeModulus(cp.p), cp.n, base, cfg.seed, cp.k,
                                        cfg.threads);
            const CoverageReport& rep = res.stats.stage_reports.back().report;
            return finish_family_write(cfg, res.family, rep, "pipeline family", cp.out,
                                       nlohmann::json(res.stats));
        }
        if (c_aa->parsed()) {
            const PartitionMode mode = ca.mode == "sampled" ? PartitionMode::sampled
                                                            : PartitionMode::exhaustive;
            IterationResult res =
                aa_iterate(PrimeModulus(ca.p), ca.ell0, ca.m, ca.zmax, mode, cfg.seed);
            CoveringFamily fam = res.family;
            std::string what = "aa family (S_z-covering)";
            if (ca.zmax >= 0 && (1ll << ca.zmax) >= ca.p - 1) {
                fam = append_zeros(fam, 1);
                what = "aa family (Z_p-covering after zero padding)";
            }
            const CoverSet target = *fam.claimed_cover();
            CoverageReport rep = is_covering(fam, target, cfg.threads);
            nlohmann::json stats{{"construction", "alon_alweiss"},
                                 {"trace", res.trace},
                                 {"s", target.format()},
                                 {"report", rep}};
            return finish_family_write(cfg, fam, rep, what, ca.out, stats);
        }
        if (verify->parsed()) {
            CoveringFamily fam = read_family(vf.family);
            CoverSet S = cover_from_spec(vf.s, fam);
            CoverageReport rep = is_covering(fam, S, cfg.threads);
            if (cfg.json())
                std::cout << nlohmann::json{{"s", S.format()}, {"report", rep}}.dump(2) << "\n";
            else
                print_report_text(rep, vf.family + " against " + S.format());
            return rep.is_covering ? 0 : 2;
        }
        if (lift->parsed()) {
            CoveringFamily src = read_family(lf.family);
            const int k = src.modulus();
            CoveringFamily out = bit_lift(src, PrimeModulus(lf.p), lf.minimal);
            CoverageReport rep = is_covering(out, CoverSet::range(lf.p, 0, k - 1), cfg.threads);
            nlohmann::json stats{{"construction", "bit_lift"},
                                 {"k", k},
                                 {"p", lf.p},
                                 {"minimal", lf.minimal},
                                 {"ell1", src.length()},
                                 {"ell2", out.length()},
                                 {"s", out.claimed_cover()->format()},
                                 {"report", rep}};
            return finish_family_write(cfg, out, rep, "bit-lifted family", lf.out, stats);
        }
        if (scale_set->parsed()) {
            ScalingSet s = find_scaling_set(PrimeModulus(ss.p), ss.k, cfg.seed);
            nlohmann::json j(s);
            j["valid"] = scaling_set_covers(s.p, s.k, s.elements);
            if (!ss.out.empty()) write_json_file(ss.out, j);
            if (cfg.json() || ss.out.empty()) std::cout << j.dump(2) << "\n";
            if (!cfg.json() && !ss.out.empty())
                std::cout << "wrote scaling set of size " << s.elements.size() << " to "
                          << ss.out << "\n";
            return 0;
        }
        if (boost->parsed()) {
            CoveringFamily src = read_family(bo.family);
            if (!*opt_concat && !*opt_scale)
                throw std::invalid_argument("boost: pass --concat or --scale");
            CoveringFamily out = *opt_concat ? concat_boost(src, bo.concat)
                                             : scale_boost(src, bo.scale);
            CoverageReport rep;
            if (out.claimed_cover()) {
                rep = is_covering(out, *out.claimed_cover(), cfg.threads);
            } else {
                rep.is_covering = true;  // nothing claimed, nothing to verify
            }
            nlohmann::json stats{{"construction", *opt_concat ? "concat_boost" : "scale_boost"},
                                 {"ell", out.length()},
                                 {"n", out.size()},
                                 {"s", out.claimed_cover() ? out.claimed_cover()->format()
                                                           : "none"},
                                 {"report", rep}};
            return finish_family_write(cfg, out, rep, "boosted family", bo.out, stats);
        }
        if (certify->parsed()) {
            CoveringFamily fam = read_family(cf.family);
            ColoringCertificate cert = family_to_colorings(fam, cf.r, cfg.threads);
            if (auto bad = verify_certificate(cert)) {
                std::cerr << "certificate verification failed: " << bad->reason << " at ("
                          << bad->j1 << "," << bad->i1 << ") vs (" << bad->j2 << "," << bad->i2
                          << ")\n";
                return 2;
            }
            write_json_file(cf.out, nlohmann::json(cert));
            if (cfg.json())
                std::cout << nlohmann::json{{"verified", true},
                                            {"p", cert.p},
                                            {"r", cert.r},
                                            {"q", cert.q},
                                            {"out", cf.out}}
                                 .dump(2)
                          << "\n";
            else
                std::cout << "certificate verified: q=" << cert.q << " colorings of Q(" << cert.p
                          << ", " << cert.r << "), wrote " << cf.out << "\n";
            return 0;
        }
        if (matroids->parsed()) {
            std::ifstream is(mt.cert);
            if (!is) throw std::runtime_error("cannot open " + mt.cert);
            nlohmann::json cj = nlohmann::json::parse(is);
            ColoringCertificate cert = certificate_from_json(cj);
            MatroidExport ex = export_partition_matroids(cert);
            bool checked = true;
            std::string mode = mt.check;
            if (mode == "auto") mode = ex.r * ex.p <= 12 ? "exhaustive" : "sampled";
            if (mode == "exhaustive")
                checked = verify_matroid_intersection_equals_cliques(
                    ex, MatroidCheckMode::exhaustive);
            else if (mode == "sampled")
                checked = verify_matroid_intersection_equals_cliques(
                    ex, MatroidCheckMode::sampled, cfg.seed);
            if (!checked) {
                std::cerr << "matroid intersection does not match the cliques\n";
                return 2;
            }
            write_json_file(mt.out, nlohmann::json(ex));
            if (cfg.json())
                std::cout << nlohmann::json{{"verified", true},
                                            {"check", mode},
                                            {"q", ex.q},
                                            {"elements", ex.r * ex.p},
                                            {"out", mt.out}}
                                 .dump(2)
                          << "\n";
            else
                std::cout << "exported " << ex.q << " partition matroids over " << ex.r * ex.p
                          << " elements (" << mode << " check passed), wrote " << mt.out << "\n";
            return 0;
        }
        if (prophet->parsed()) {
            ProphetInstance inst(pr.p, pr.r);
            std::optional<long long> mc;
            if (pr.mc > 0) mc = pr.mc;
            ValueReport rep = gap_report(inst, mc, cfg.seed);
            if (!pr.out.empty()) write_json_file(pr.out, nlohmann::json(rep));
            if (cfg.json()) {
                std::cout << nlohmann::json(rep).dump(2) << "\n";
            } else {
                std::printf("%7s %7s %14s %14s %14s %14s %7s\n", "p", "r", "prophet", "gambler",
                            "ratio", "bound", "result");
                std::printf("%7d %7d %14.10f %14.10f %14.10f %14s %7s\n", rep.p, rep.r,
                            rep.prophet_exact, rep.gambler_exact, rep.ratio,
                            rep.ratio_lb ? fmt_double(*rep.ratio_lb).c_str() : "-",
                            rep.bounds_pass ? "PASS" : "FAIL");
                if (rep.prophet_mc)
                    std::printf("mc: prophet %.6f +- %.6f, gambler %.6f +- %.6f (%lld samples)\n",
                                rep.prophet_mc->estimate, rep.prophet_mc->ci_half_width,
                                rep.gambler_mc->estimate, rep.gambler_mc->ci_half_width,
                                static_cast<long long>(rep.prophet_mc->samples));
            }
            return rep.bounds_pass ? 0 : 2;
        }
        if (bounds->parsed()) {
            BoundReport rep = make_bound_report(PrimeModulus(bd.p), bd.log2n);
            if (!bd.out.empty()) write_json_file(bd.out, nlohmann::json(rep));
            if (cfg.json()) {
                std::cout << nlohmann::json(rep).dump(2) << "\n";
            } else {
                std::printf("lower          %s\n", fmt_double(rep.lower).c_str());
                std::printf("upper_trivial  %s\n", fmt_double(rep.upper_trivial).c_str());
                std::printf("upper_pipeline %s\n",
                            rep.upper_pipeline ? fmt_double(*rep.upper_pipeline).c_str() : "-");
            }
            return 0;
        }
    } catch (const VerificationError& e) {
        std::cerr << "verification failed: " << e.what() << "\n";
        if (e.report.first_failure)
            std::cerr << "  first failure: ordered pair (" << e.report.first_failure->v_index
                      << ", " << e.report.first_failure->w_index << ") misses "
                      << e.report.first_failure->missing << "\n";
        return 2;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
