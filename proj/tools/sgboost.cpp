// Command-line front end: fit, report, probe, synth, cv-curve.

#include <CLI11.hpp>

#include <charconv>
#include <iostream>

#include "sgboost/commands.hpp"
#include "sgboost/error.hpp"

using namespace sgboost;

namespace {

struct FitFlags {
    RunConfig config;
    std::string model = "mb";
    std::string offset_mode = "mean-link";
    CLI::Option* alpha = nullptr;
};

void add_run_flags(CLI::App* cmd, FitFlags& f) {
    cmd->add_option("--data", f.config.data_path, "Input CSV with a header row")->required();
    cmd->add_option("--schema", f.config.schema_path, "Schema JSON")->required();
    cmd->add_option("--out", f.config.output_dir, "Output directory")->required();
    cmd->add_option("--model", f.model, "mb, group, sgb, mb-int or 2-boost")->capture_default_str();
    f.alpha = cmd->add_option("--alpha", f.config.model.alpha, "Mixing parameter (sgb only)")
                  ->capture_default_str();
    cmd->add_option("--eta", f.config.model.boost.eta, "Learning rate in (0, 1)")->capture_default_str();
    cmd->add_option("--m-max", f.config.model.m_max, "Largest iteration count considered by CV")
        ->capture_default_str();
    cmd->add_option("--cv-folds", f.config.model.cv_folds, "Cross-validation folds")->capture_default_str();
    cmd->add_option("--train-fraction", f.config.train_fraction, "Share of rows used for training")
        ->capture_default_str();
    cmd->add_option("--seed", f.config.model.seed, "Seed for split and folds")->capture_default_str();
    cmd->add_option("--offset-mode", f.offset_mode, "zero or mean-link")->capture_default_str();
    cmd->add_option("--threads", f.config.model.threads, "CV worker threads, 0 = all cores")
        ->capture_default_str();
}

void finish(FitFlags& f) {
    f.config.model.model = parse_model_kind(f.model);
    f.config.model.boost.offset_mode = parse_offset_mode(f.offset_mode);
}

std::pair<std::string, double> key_value(const std::string& text) {
    const auto eq = text.rfind('=');
    if (eq == std::string::npos || eq == 0) {
        fail(ErrorCode::InvalidArgument, "'" + text + "' must look like key=value");
    }
    double v = 0.0;
    const char* first = text.data() + eq + 1;
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) {
        fail(ErrorCode::InvalidArgument, "'" + text + "' has no numeric value");
    }
    return {text.substr(0, eq), v};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Interpretable model-based boosting for binary outcomes"};
    app.set_version_flag("--version", software_version());
    app.require_subcommand(1);

    FitFlags fit_flags;
    auto* fit = app.add_subcommand("fit", "Split, tune m by CV, fit, evaluate and write reports");
    add_run_flags(fit, fit_flags);

    FitFlags cv_flags;
    auto* cv = app.add_subcommand("cv-curve", "Write the cross-validated risk curve of each stage");
    add_run_flags(cv, cv_flags);

    std::string report_model, report_data, report_out, report_schema;
    auto* report = app.add_subcommand("report", "Regenerate reports from a saved model");
    report->add_option("--model", report_model, "model.json written by fit")->required();
    report->add_option("--data", report_data, "The CSV the model was fitted on")->required();
    report->add_option("--out", report_out, "Output directory")->required();
    report->add_option("--schema", report_schema, "Schema to check against the model's fingerprint");

    ProbeRequest probe_req;
    std::string strata;
    bool no_main = false;
    std::string probe_data, probe_schema, probe_out;
    auto* probe = app.add_subcommand("probe", "Per-term logistic regressions by stratum");
    probe->add_option("--data", probe_data, "Input CSV")->required();
    probe->add_option("--schema", probe_schema, "Schema JSON")->required();
    probe->add_option("--out", probe_out, "Output CSV")->required();
    probe->add_option("--term", probe_req.terms, "moderator:partner (repeatable; default all)");
    probe->add_option("--strata", strata, "Column to stratify by; pooled is always reported");
    probe->add_flag("--no-main-effects", no_main, "Fit the product terms without main effects");

    int synth_p = 10, synth_mods = 2, synth_group = 5;
    Index synth_n = 1000;
    std::uint64_t synth_seed = 1;
    double synth_share = 0.0, synth_intercept = 0.0;
    std::vector<std::string> betas, interactions, latents, marginals;
    std::string synth_data, synth_schema, synth_truth;
    auto* synth = app.add_subcommand("synth", "Generate binary data with planted effects");
    synth->add_option("--n", synth_n, "Rows")->capture_default_str();
    synth->add_option("--p", synth_p, "Binary predictors x1..xp")->capture_default_str();
    synth->add_option("--moderators", synth_mods, "x1..xk are moderators")->capture_default_str();
    synth->add_option("--group-size", synth_group, "Variables per group")->capture_default_str();
    synth->add_option("--seed", synth_seed, "Generator seed")->capture_default_str();
    synth->add_option("--beta", betas, "Main effect, e.g. x1=1.5 (repeatable)");
    synth->add_option("--interaction", interactions, "Interaction, e.g. x1:x4=2.5 (repeatable)");
    synth->add_option("--latent", latents, "Group latent effect, e.g. g1=1 (repeatable)");
    synth->add_option("--marginal", marginals, "P(x=1), e.g. x3=0.2 (repeatable)");
    synth->add_option("--latent-share", synth_share, "Chance a variable copies its group's latent")
        ->capture_default_str();
    synth->add_option("--intercept", synth_intercept, "Intercept")->capture_default_str();
    synth->add_option("--out-data", synth_data, "Output CSV")->required();
    synth->add_option("--out-schema", synth_schema, "Output schema JSON")->required();
    synth->add_option("--out-truth", synth_truth, "Output CSV of true probabilities");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*fit) {
            finish(fit_flags);
            const auto a = cmd_fit(fit_flags.config, fit_flags.alpha->count() > 0);
            std::cout << "test auc " << format_double(a.test_auc) << "\n";
            for (const auto& s : a.stages) {
                std::cout << "stage " << s.name << ": " << s.learner_count << " learners, m* = "
                          << s.m_star << "\n";
            }
        } else if (*cv) {
            finish(cv_flags);
            cmd_cv_curve(cv_flags.config, cv_flags.alpha->count() > 0);
        } else if (*report) {
            std::optional<std::filesystem::path> schema;
            if (!report_schema.empty()) {
                schema = report_schema;
            }
            cmd_report(report_model, report_data, report_out, schema);
        } else if (*probe) {
            probe_req.data_path = probe_data;
            probe_req.schema_path = probe_schema;
            probe_req.output = probe_out;
            probe_req.main_effects = !no_main;
            if (!strata.empty()) {
                probe_req.strata_column = strata;
            }
            cmd_probe(probe_req);
        } else if (*synth) {
            SynthSpec spec;
            spec.n = synth_n;
            spec.schema = make_synth_schema(synth_p, synth_mods, synth_group);
            spec.seed = synth_seed;
            spec.latent_share = synth_share;
            spec.intercept = synth_intercept;
            for (const auto& b : betas) spec.beta_main.insert(key_value(b));
            for (const auto& l : latents) spec.beta_latent.insert(key_value(l));
            for (const auto& m : marginals) spec.marginal.insert(key_value(m));
            for (const auto& t : interactions) {
                auto [key, v] = key_value(t);
                const auto colon = key.find(':');
                if (colon == std::string::npos) {
                    fail(ErrorCode::InvalidArgument, "'" + t + "' must look like a:b=value");
                }
                spec.beta_interaction.push_back({key.substr(0, colon), key.substr(colon + 1), v});
            }
            std::optional<std::filesystem::path> truth;
            if (!synth_truth.empty()) {
                truth = synth_truth;
            }
            cmd_synth(spec, synth_data, synth_schema, truth);
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
