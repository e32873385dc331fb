// recodyn command line: every analysis is a pipeline of subcommands writing
// machine-readable CSV/JSON. `select` produces a full report bundle that can
// be re-validated byte-for-byte with `report --validate`.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "recodyn/analysis.hpp"
#include "recodyn/config.hpp"
#include "recodyn/dataset.hpp"
#include "recodyn/discretize.hpp"
#include "recodyn/errors.hpp"
#include "recodyn/infotheory.hpp"
#include "recodyn/mfs.hpp"
#include "recodyn/odds.hpp"
#include "recodyn/partition.hpp"
#include "recodyn/shadow.hpp"
#include "recodyn/simgen.hpp"
#include "recodyn/svg.hpp"

namespace fs = std::filesystem;
using recodyn::Json;

namespace {

void write_file(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw recodyn::Error("cannot write '" + path.string() + "'");
    out << content;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw recodyn::Error("cannot read '" + path.string() + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

struct CommonOpts {
    std::string data, out, config_path, kinds_path;
    std::string response;
    std::vector<std::string> covariates;
    recodyn::ProtocolConfig cfg;
    std::vector<std::string> flag_overrides; // key=value pairs set via flags

    recodyn::Dataset load() const {
        recodyn::IngestOptions opts;
        if (!kinds_path.empty()) opts.kind_overrides = recodyn::load_kind_overrides(kinds_path);
        return recodyn::ingest_csv(data, response.empty() ? std::vector<std::string>{}
                                                          : std::vector<std::string>{response},
                                   opts);
    }
};

// config file first, then flags win (with a notice)
void add_config_flags(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--config", o.config_path, "config file (key = value lines)");
    cmd->add_option("--set", o.flag_overrides, "override a config key, e.g. --set bins=10")
        ->take_all();
    cmd->add_option("--bins", [&o](const std::vector<std::string>& v) {
        o.flag_overrides.push_back("bins=" + v[0]); return true; }, "covariate bins");
    cmd->add_option("--response-bins", [&o](const std::vector<std::string>& v) {
        o.flag_overrides.push_back("response_bins=" + v[0]); return true; }, "response bins");
    cmd->add_option("--scheme", [&o](const std::vector<std::string>& v) {
        o.flag_overrides.push_back("scheme=" + v[0]); return true; },
        "equal_frequency | equal_width");
    cmd->add_option("--k", [&o](const std::vector<std::string>& v) {
        o.flag_overrides.push_back("k_max=" + v[0]); return true; }, "max feature-setting order");
    cmd->add_option("--z", [&o](const std::vector<std::string>& v) {
        o.flag_overrides.push_back("z=" + v[0]); return true; }, "[C1] significance (sd units)");
    cmd->add_option("--replicates", [&o](const std::vector<std::string>& v) {
        o.flag_overrides.push_back("replicates=" + v[0]); return true; }, "noise replicates");
    cmd->add_option("--min-cell", [&o](const std::vector<std::string>& v) {
        o.flag_overrides.push_back("min_cell=" + v[0]); return true; }, "min locality size");
    cmd->add_option("--max-depth", [&o](const std::vector<std::string>& v) {
        o.flag_overrides.push_back("max_depth=" + v[0]); return true; }, "max growth rounds");
    cmd->add_option("--refine-factor", [&o](const std::vector<std::string>& v) {
        o.flag_overrides.push_back("refine_factor=" + v[0]); return true; }, "refinement bin factor");
    cmd->add_option("--seed", [&o](const std::vector<std::string>& v) {
        o.flag_overrides.push_back("seed=" + v[0]); return true; }, "master seed");
    cmd->add_option("--threads", [&o](const std::vector<std::string>& v) {
        o.flag_overrides.push_back("threads=" + v[0]); return true; }, "worker threads");
    cmd->add_option("--sigma-eps", [&o](const std::vector<std::string>& v) {
        o.flag_overrides.push_back("sigma_eps=" + v[0]); return true; }, "simulation noise sd");
    cmd->add_option("--rho", [&o](const std::vector<std::string>& v) {
        o.flag_overrides.push_back("rho=" + v[0]); return true; }, "simulation equicorrelation");
}

void finalize_config(CommonOpts& o, bool stochastic = false) {
    if (!o.config_path.empty()) o.cfg = recodyn::ProtocolConfig::load(o.config_path);
    bool seed_given = !o.config_path.empty();
    for (const auto& kv : o.flag_overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw recodyn::ConfigError("bad --set '" + kv + "'");
        const std::string key = kv.substr(0, eq);
        if (key == "seed") seed_given = true;
        if (!o.config_path.empty())
            std::cerr << "notice: flag overrides config key '" << key << "'\n";
        o.cfg.set(key, kv.substr(eq + 1));
    }
    if (stochastic && !seed_given)
        throw recodyn::ConfigError("this subcommand is stochastic: pass --seed (or a config file)");
    if (o.cfg.threads == 1) {
        if (const char* env = std::getenv("RECODYN_THREADS")) o.cfg.threads = std::atoi(env);
        if (o.cfg.threads < 1) o.cfg.threads = 1;
    }
    o.cfg.validate();
}

int fail_json(const std::exception& e) {
    Json err;
    err["error"] = {{"message", e.what()}};
    std::cout << err.dump(2) << std::endl;
    return 1;
}

void write_report_bundle(const fs::path& dir, const recodyn::MajorFactorReport& rep) {
    fs::create_directories(dir);
    write_file(dir / "report.json", rep.document.dump(2) + "\n");
    for (const auto& [name, content] : rep.attachments) write_file(dir / name, content);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"information-theoretic major factor selection for response-covariate dynamics"};
    app.require_subcommand(1);

    CommonOpts o;

    // ---- simulate ----
    auto* sim = app.add_subcommand("simulate", "generate a synthetic dataset CSV");
    std::string example = "1";
    std::size_t sim_n = 100000;
    sim->add_option("--example", example, "1 | 2 | xor | custom")->required();
    sim->add_option("--n", sim_n, "rows")->required();
    sim->add_option("--out", o.out, "output CSV")->required();
    std::vector<double> custom_coefs;
    std::size_t custom_k = 0;
    sim->add_option("--coef", custom_coefs, "custom example coefficients")->take_all();
    sim->add_option("--covariates", custom_k, "custom example covariate count");
    add_config_flags(sim, o);
    sim->callback([&] {
        finalize_config(o, /*stochastic=*/true);
        recodyn::SimSpec spec;
        spec.n = sim_n;
        spec.seed = o.cfg.seed;
        spec.rho = o.cfg.rho;
        spec.sigma_eps = o.cfg.sigma_eps;
        if (example == "1") spec.example = recodyn::SimExample::One;
        else if (example == "2") spec.example = recodyn::SimExample::Two;
        else if (example == "xor") spec.example = recodyn::SimExample::Xor;
        else if (example == "custom") {
            spec.example = recodyn::SimExample::Custom;
            spec.coefficients = custom_coefs;
            spec.custom_covariates = custom_k;
        } else throw recodyn::ConfigError("unknown example '" + example + "'");
        const recodyn::Dataset ds = recodyn::generate(spec);
        write_file(o.out, ds.to_csv());
        std::cout << "wrote " << ds.n_rows() << " rows x " << ds.n_cols() << " cols to " << o.out
                  << "\n";
    });

    // ---- ingest-check ----
    auto* ing = app.add_subcommand("ingest-check", "parse a CSV and report column typing");
    ing->add_option("--data", o.data, "input CSV")->required();
    ing->add_option("--response", o.response, "response column");
    ing->add_option("--kinds", o.kinds_path, "per-column kind override file");
    ing->add_option("--out", o.out, "write summary JSON here (default stdout)");
    ing->callback([&] {
        const recodyn::Dataset ds = o.load();
        Json j;
        j["n_rows"] = ds.n_rows();
        j["n_cols"] = ds.n_cols();
        Json cols = Json::array();
        for (const auto& f : ds.features()) {
            Json c;
            c["name"] = f.name;
            c["kind"] = f.kind == recodyn::FeatureKind::Continuous ? "continuous" : "categorical";
            c["response"] = f.is_response;
            if (f.kind == recodyn::FeatureKind::Categorical) c["categories"] = f.cat_labels.size();
            std::size_t miss = 0;
            if (f.has_missing())
                for (bool b : f.missing)
                    if (b) ++miss;
            c["missing"] = miss;
            cols.push_back(c);
        }
        j["columns"] = cols;
        const std::string text = j.dump(2) + "\n";
        if (o.out.empty()) std::cout << text;
        else write_file(o.out, text);
    });

    // ---- bin ----
    auto* bin = app.add_subcommand("bin", "bin continuous features; write edges CSV");
    bin->add_option("--data", o.data, "input CSV")->required();
    bin->add_option("--kinds", o.kinds_path, "per-column kind override file");
    bin->add_option("--features", o.covariates, "features to bin (default: all continuous)");
    bin->add_option("--out", o.out, "output CSV")->required();
    add_config_flags(bin, o);
    bin->callback([&] {
        finalize_config(o);
        const recodyn::Dataset ds = o.load();
        std::string csv = "feature,bin,lower_edge,upper_edge,count\n";
        auto names = o.covariates;
        if (names.empty())
            for (const auto& f : ds.features())
                if (f.kind == recodyn::FeatureKind::Continuous) names.push_back(f.name);
        for (const auto& nm : names) {
            const auto& f = ds.feature(nm);
            if (f.kind != recodyn::FeatureKind::Continuous) continue;
            std::vector<double> distinct = f.numeric;
            std::sort(distinct.begin(), distinct.end());
            distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
            if (distinct.size() < static_cast<std::size_t>(o.cfg.bins)) {
                std::cerr << "notice: skipping '" << nm << "' (only " << distinct.size()
                          << " distinct values)\n";
                continue;
            }
            const auto coded = recodyn::bin_feature(nm, f.numeric, o.cfg.bins, o.cfg.scheme);
            const std::string block = recodyn::bin_edges_csv(coded);
            csv += block.substr(block.find('\n') + 1); // drop repeated header
        }
        write_file(o.out, csv);
        std::cout << "wrote " << o.out << "\n";
    });

    // ---- mce ----
    auto* mcec = app.add_subcommand("mce", "mutual conditional entropy matrix + clustering order");
    mcec->add_option("--data", o.data, "input CSV")->required();
    mcec->add_option("--kinds", o.kinds_path, "per-column kind override file");
    mcec->add_option("--response", o.response, "response column")->required();
    mcec->add_option("--covariates", o.covariates, "covariates (default: all others)");
    mcec->add_option("--out", o.out, "output CSV")->required();
    bool emit_svg = false;
    mcec->add_flag("--svg", emit_svg, "also emit a grayscale heatmap SVG next to --out");
    add_config_flags(mcec, o);
    mcec->callback([&] {
        finalize_config(o);
        const recodyn::Dataset ds = o.load();
        const auto frame = recodyn::code_frame(ds, o.response, o.covariates, o.cfg);
        std::vector<const recodyn::CodedColumn*> all;
        all.push_back(&frame.response);
        for (const auto& c : frame.covariates) all.push_back(&c);
        const auto m = recodyn::mce_matrix(all, o.cfg.threads);
        write_file(o.out, recodyn::mce_csv(m));
        if (emit_svg)
            write_file(fs::path(o.out).replace_extension(".svg"), recodyn::mce_heatmap_svg(m));
        std::cout << "wrote " << o.out << "\n";
    });

    // ---- ce ----
    auto* cec = app.add_subcommand("ce", "ranked conditional-entropy table for k-feature sets");
    cec->add_option("--data", o.data, "input CSV")->required();
    cec->add_option("--kinds", o.kinds_path, "per-column kind override file");
    cec->add_option("--response", o.response, "response column")->required();
    cec->add_option("--covariates", o.covariates, "covariates (default: all others)");
    cec->add_option("--out", o.out, "output CSV")->required();
    int ce_k = 1;
    cec->add_option("--k-exact", ce_k, "emit exactly this k (default: k from config)");
    add_config_flags(cec, o);
    cec->callback([&] {
        finalize_config(o);
        const recodyn::Dataset ds = o.load();
        const auto frame = recodyn::code_frame(ds, o.response, o.covariates, o.cfg);
        const int k = cec->count("--k-exact") ? ce_k : o.cfg.k_max;
        const auto table = recodyn::enumerate_ce(frame.response, frame.covariate_ptrs(), k, o.cfg);
        write_file(o.out, recodyn::ce_csv(table));
        std::cout << "wrote " << o.out << " (" << table.entries.size() << " sets, " << table.mode
                  << ")\n";
    });

    // ---- shadow ----
    auto* sh = app.add_subcommand("shadow", "shadow the response by a feature-set and re-rank CE");
    sh->add_option("--data", o.data, "input CSV")->required();
    sh->add_option("--kinds", o.kinds_path, "per-column kind override file");
    sh->add_option("--response", o.response, "response column")->required();
    std::vector<std::string> cond_set;
    sh->add_option("--by", cond_set, "shadowing feature-set")->required();
    sh->add_option("--covariates", o.covariates, "covariates (default: all others)");
    sh->add_option("--out", o.out, "output CSV prefix (one file per k)")->required();
    bool export_col = false;
    sh->add_flag("--export-column", export_col, "also write the shadowed column as CSV");
    add_config_flags(sh, o);
    sh->callback([&] {
        finalize_config(o, /*stochastic=*/true);
        const recodyn::Dataset ds = o.load();
        const auto tables =
            recodyn::shadow_analysis(ds, cond_set, o.response, o.covariates, o.cfg.k_max, o.cfg);
        for (const auto& t : tables)
            write_file(o.out + ".k" + std::to_string(t.k) + ".csv", recodyn::ce_csv(t));
        if (export_col) {
            const auto frame = recodyn::code_frame(ds, o.response, {}, o.cfg);
            std::vector<const recodyn::CodedColumn*> cols;
            for (const auto& nm : cond_set) cols.push_back(&frame.covariate(nm));
            const auto fused = recodyn::fuse(cols);
            const auto shadowed = recodyn::shadow(fused, frame.response, o.cfg.seed);
            std::string csv = shadowed.name + "\n";
            for (auto c : shadowed.codes) csv += std::to_string(c) + "\n";
            write_file(o.out + ".column.csv", csv);
        }
        std::cout << "wrote " << tables.size() << " tables at prefix " << o.out << "\n";
    });

    // ---- deassoc ----
    auto* da = app.add_subcommand("deassoc", "per-locality and weighted CE under a conditioning set");
    da->add_option("--data", o.data, "input CSV")->required();
    da->add_option("--kinds", o.kinds_path, "per-column kind override file");
    da->add_option("--response", o.response, "response column")->required();
    std::vector<std::string> da_by;
    da->add_option("--by", da_by, "conditioning feature-set")->required();
    da->add_option("--covariates", o.covariates, "covariates (default: all others minus --by)");
    da->add_option("--out", o.out, "output CSV")->required();
    std::string da_split;
    da->add_option("--split-dir", da_split, "also write one CSV per locality into this directory");
    add_config_flags(da, o);
    da->callback([&] {
        finalize_config(o);
        const recodyn::Dataset ds = o.load();
        const auto t = recodyn::deassoc_ce(ds, da_by, o.response, o.covariates,
                                           std::min(o.cfg.k_max, 2), o.cfg.min_cell, o.cfg);
        write_file(o.out, recodyn::conditional_ce_csv(t));
        if (!da_split.empty()) {
            for (std::size_t k = 0; k < t.reported_cells.size(); ++k) {
                std::string label = t.cell_labels[k];
                for (char& ch : label)
                    if (!std::isalnum(static_cast<unsigned char>(ch))) ch = '_';
                std::string csv = "feature_set,ce\n";
                std::ostringstream val;
                val.precision(12);
                for (const auto& e : t.entries) {
                    std::string nm;
                    for (const auto& f : e.features) nm += (nm.empty() ? "" : "_") + f;
                    val.str("");
                    val << e.cell_ce[k];
                    csv += nm + "," + val.str() + "\n";
                }
                write_file(fs::path(da_split) / ("locality_" + label + ".csv"), csv);
            }
        }
        Json summary;
        summary["conditioning"] = t.conditioning;
        summary["base_weighted_ce"] = t.base_weighted_ce;
        summary["reported_localities"] = t.reported_cells.size();
        summary["skipped_localities"] = t.skipped_cells.size();
        write_file(fs::path(o.out).replace_extension(".json"), summary.dump(2) + "\n");
        std::cout << "wrote " << o.out << "\n";
    });

    // ---- select ----
    auto* sel = app.add_subcommand("select", "run the full MFS protocol; write a report bundle");
    sel->add_option("--data", o.data, "input CSV")->required();
    sel->add_option("--response", o.response, "response column")->required();
    sel->add_option("--covariates", o.covariates, "covariates (default: all others)");
    sel->add_option("--out", o.out, "report directory")->required();
    sel->add_option("--kinds", o.kinds_path, "per-column kind override file");
    bool sel_svg = false;
    sel->add_flag("--svg", sel_svg, "emit heatmap SVG into the bundle");
    add_config_flags(sel, o);
    sel->callback([&] {
        finalize_config(o, /*stochastic=*/true);
        const recodyn::Dataset ds = o.load();
        auto rep = recodyn::run_protocol(ds, o.response, o.covariates, o.cfg);
        if (sel_svg) {
            const auto frame = recodyn::code_frame(ds, o.response, o.covariates, o.cfg);
            std::vector<const recodyn::CodedColumn*> all;
            all.push_back(&frame.response);
            for (const auto& c : frame.covariates) all.push_back(&c);
            rep.attachments["mce.svg"] = recodyn::mce_heatmap_svg(recodyn::mce_matrix(all, o.cfg.threads));
        }
        write_report_bundle(o.out, rep);
        std::cout << "major factors: " << rep.factors_display() << "\n";
        std::cout << "report bundle: " << o.out << "\n";
    });

    // ---- odds ----
    auto* od = app.add_subcommand("odds", "locality odds / best triplets / majority rule");
    od->add_option("--data", o.data, "input CSV")->required();
    od->add_option("--response", o.response, "binary response column")->required();
    std::vector<std::string> od_loc, od_exp, od_cand;
    od->add_option("--localities", od_loc, "locality feature-set")->required();
    od->add_option("--expand", od_exp, "expansion feature-set");
    od->add_option("--triplet-candidates", od_cand, "binary features for best-triplet search");
    od->add_option("--kinds", o.kinds_path, "per-column kind override file");
    od->add_option("--out", o.out, "output CSV")->required();
    bool od_svg = false, od_majority = false;
    od->add_flag("--svg", od_svg, "emit odds dot plot SVG");
    od->add_flag("--majority", od_majority, "also evaluate majority rule vs blind rule");
    add_config_flags(od, o);
    od->callback([&] {
        finalize_config(o);
        const recodyn::Dataset ds = o.load();
        const auto t = recodyn::locality_odds(ds, o.response, od_loc, od_exp, o.cfg);
        write_file(o.out, recodyn::locality_odds_csv(t));
        if (od_svg)
            write_file(fs::path(o.out).replace_extension(".svg"), recodyn::odds_dotplot_svg(t));
        if (!od_cand.empty()) {
            const auto trip = recodyn::best_triplet_per_locality(ds, o.response, od_loc, od_cand,
                                                                 o.cfg.min_cell, o.cfg);
            write_file(fs::path(o.out).replace_extension(".triplets.csv"),
                       recodyn::triplets_csv(trip));
        }
        if (od_majority) {
            const auto m = recodyn::majority_rule_eval(ds, o.response, od_loc, o.cfg);
            Json j;
            j["majority_accuracy"] = m.majority_accuracy;
            j["blind_accuracy"] = m.blind_accuracy;
            write_file(fs::path(o.out).replace_extension(".majority.json"), j.dump(2) + "\n");
        }
        std::cout << "wrote " << o.out << "\n";
    });

    // ---- report ----
    auto* rp = app.add_subcommand("report", "re-validate a report bundle from its embedded config");
    std::string bundle;
    rp->add_option("--validate", bundle, "report directory to re-run and compare")->required();
    rp->add_option("--data", o.data, "dataset CSV used for the original run")->required();
    rp->callback([&] {
        const Json doc = Json::parse(read_file(fs::path(bundle) / "report.json"));
        recodyn::ProtocolConfig cfg;
        for (const auto& [k, v] : doc["config"].items()) cfg.set(k, v.get<std::string>());
        cfg.validate();
        const std::string response = doc["response"].get<std::string>();
        std::vector<std::string> covs;
        for (const auto& c : doc["covariates"]) covs.push_back(c.get<std::string>());
        const recodyn::Dataset ds =
            recodyn::ingest_csv(o.data, {response}, recodyn::IngestOptions{});
        const auto rep = recodyn::run_protocol(ds, response, covs, cfg);
        const std::string fresh = rep.document.dump(2) + "\n";
        const std::string original = read_file(fs::path(bundle) / "report.json");
        if (fresh == original) {
            std::cout << "report validated: byte-identical reproduction\n";
        } else {
            std::cout << "report MISMATCH: re-run differs from the stored report\n";
            std::exit(2);
        }
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        return fail_json(e);
    }
    return 0;
}
