#include "sgboost/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <tuple>

#include "sgboost/boost.hpp"
#include "sgboost/error.hpp"
#include "sgboost/rng.hpp"

namespace sgboost {

namespace {

// A coefficient key resolved to (variable index, category index or -1 for
// the raw continuous value).
struct Factor {
    std::size_t variable = 0;
    int category = -1;
};

Factor resolve_key(const DatasetSchema& schema, const std::string& key) {
    const auto eq = key.find('=');
    const std::string name = key.substr(0, eq);
    const auto v = schema.find(name);
    if (!v) {
        fail(ErrorCode::InvalidArgument, "coefficient names unknown variable '" + name + "'");
    }
    const auto& spec = schema.variables[*v];
    if (eq == std::string::npos) {
        if (spec.kind == VariableKind::continuous) {
            return {*v, -1};
        }
        if (spec.kind == VariableKind::binary) {
            return {*v, 1};
        }
        fail(ErrorCode::InvalidArgument,
             "categorical variable '" + name + "' needs a 'var=category' coefficient key");
    }
    const std::string cat = key.substr(eq + 1);
    auto it = std::find(spec.categories.begin(), spec.categories.end(), cat);
    if (it == spec.categories.end()) {
        fail(ErrorCode::UnknownCategory, "coefficient key '" + key + "' names no category");
    }
    return {*v, static_cast<int>(it - spec.categories.begin())};
}

// Value of a factor given a row's per-variable draws (category index, or the
// continuous value stored in raw).
double factor_value(const Factor& f, const std::vector<int>& cat, const std::vector<double>& raw) {
    if (f.category < 0) {
        return raw[f.variable];
    }
    return cat[f.variable] == f.category ? 1.0 : 0.0;
}

struct Model {
    std::vector<std::pair<Factor, double>> main;
    std::vector<std::tuple<Factor, Factor, double>> inter;
    std::vector<std::pair<std::size_t, double>> latent;  // group index, beta
    std::vector<std::string> groups;
    std::vector<std::size_t> group_of;                   // per variable
    std::vector<double> marginal;                        // per variable
};

Model compile(const SynthSpec& spec) {
    Model m;
    const auto& schema = spec.schema;
    m.groups = schema.groups();
    for (const auto& v : schema.variables) {
        m.group_of.push_back(static_cast<std::size_t>(
            std::find(m.groups.begin(), m.groups.end(), v.group) - m.groups.begin()));
        auto it = spec.marginal.find(v.name);
        m.marginal.push_back(it == spec.marginal.end() ? 0.5 : it->second);
    }
    for (const auto& [key, beta] : spec.beta_main) {
        m.main.emplace_back(resolve_key(schema, key), beta);
    }
    for (const auto& t : spec.beta_interaction) {
        m.inter.emplace_back(resolve_key(schema, t.moderator), resolve_key(schema, t.partner), t.beta);
    }
    for (const auto& [group, beta] : spec.beta_latent) {
        auto it = std::find(m.groups.begin(), m.groups.end(), group);
        if (it == m.groups.end()) {
            fail(ErrorCode::InvalidArgument, "latent coefficient names unknown group '" + group + "'");
        }
        m.latent.emplace_back(static_cast<std::size_t>(it - m.groups.begin()), beta);
    }
    return m;
}

double linear_predictor(const Model& m, double intercept, const std::vector<int>& cat,
                        const std::vector<double>& raw, const std::vector<int>& latent) {
    double eta = intercept;
    for (const auto& [f, b] : m.main) {
        eta += b * factor_value(f, cat, raw);
    }
    for (const auto& [a, c, b] : m.inter) {
        eta += b * factor_value(a, cat, raw) * factor_value(c, cat, raw);
    }
    for (const auto& [g, b] : m.latent) {
        eta += b * latent[g];
    }
    return eta;
}

std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

void SynthSpec::validate() const {
    if (n < 1) {
        fail(ErrorCode::InvalidArgument, "n must be at least 1");
    }
    schema.validate();
    if (!(latent_share >= 0.0 && latent_share <= 1.0)) {
        fail(ErrorCode::InvalidArgument, "latent share must lie in [0, 1]");
    }
    if (!std::isfinite(intercept)) {
        fail(ErrorCode::InvalidArgument, "intercept must be finite");
    }
    for (const auto& [k, p] : marginal) {
        if (!schema.find(k)) {
            fail(ErrorCode::InvalidArgument, "marginal names unknown variable '" + k + "'");
        }
        if (!(p > 0.0 && p < 1.0)) {
            fail(ErrorCode::InvalidArgument, "marginal of '" + k + "' must lie in (0, 1)");
        }
    }
    auto finite = [](double b, const std::string& what) {
        if (!std::isfinite(b)) {
            fail(ErrorCode::InvalidArgument, "coefficient of '" + what + "' is not finite");
        }
    };
    for (const auto& [k, b] : beta_main) finite(b, k);
    for (const auto& t : beta_interaction) finite(t.beta, t.moderator + ":" + t.partner);
    for (const auto& [k, b] : beta_latent) finite(b, k);
}

SynthData generate(const SynthSpec& spec) {
    spec.validate();
    const Model m = compile(spec);
    const auto& vars = spec.schema.variables;
    const CounterRng root(spec.seed);

    SynthData out;
    out.table.header.reserve(vars.size() + 1);
    for (const auto& v : vars) {
        out.table.header.push_back(v.name);
    }
    out.table.header.push_back(spec.schema.outcome.name);
    out.eta.resize(spec.n);
    out.probability.resize(spec.n);

    std::vector<int> cat(vars.size());
    std::vector<double> raw(vars.size());
    std::vector<int> latent(m.groups.size());
    for (Index i = 0; i < spec.n; ++i) {
        CounterRng rng = root.split("row", static_cast<std::uint64_t>(i));
        for (auto& z : latent) {
            z = rng.bernoulli(0.5) ? 1 : 0;
        }
        std::vector<std::string> row;
        row.reserve(vars.size() + 1);
        for (std::size_t j = 0; j < vars.size(); ++j) {
            const auto& v = vars[j];
            const bool copy = spec.latent_share > 0.0 && rng.bernoulli(spec.latent_share);
            switch (v.kind) {
                case VariableKind::binary:
                    cat[j] = copy ? latent[m.group_of[j]] : (rng.bernoulli(m.marginal[j]) ? 1 : 0);
                    row.push_back(v.categories[static_cast<std::size_t>(cat[j])]);
                    break;
                case VariableKind::categorical: {
                    const int k = static_cast<int>(v.categories.size());
                    cat[j] = copy ? (latent[m.group_of[j]] ? k - 1 : 0)
                                  : static_cast<int>(rng.below(static_cast<std::uint64_t>(k)));
                    row.push_back(v.categories[static_cast<std::size_t>(cat[j])]);
                    break;
                }
                case VariableKind::continuous:
                    raw[j] = copy ? (latent[m.group_of[j]] ? 1.0 : -1.0) : rng.normal();
                    row.push_back(format_number(raw[j]));
                    break;
            }
        }
        const double eta = linear_predictor(m, spec.intercept, cat, raw, latent);
        const double p = BinomialLoss::link(eta);
        out.eta(i) = eta;
        out.probability(i) = p;
        row.push_back(rng.bernoulli(p) ? spec.schema.outcome.positive : spec.schema.outcome.negative);
        out.table.rows.push_back(std::move(row));
    }
    return out;
}

DatasetSchema make_synth_schema(int p, int n_moderators, int group_size) {
    if (p < 1 || group_size < 1 || n_moderators < 0 || n_moderators > p) {
        fail(ErrorCode::InvalidArgument, "synthetic schema needs p >= 1, group size >= 1 and "
                                         "0 <= moderators <= p");
    }
    DatasetSchema s;
    s.outcome.name = "y";
    for (int j = 0; j < p; ++j) {
        VariableSpec v;
        v.name = "x" + std::to_string(j + 1);
        v.kind = VariableKind::binary;
        v.categories = {"0", "1"};
        v.group = "g" + std::to_string(j / group_size + 1);
        v.is_moderator = j < n_moderators;
        s.variables.push_back(std::move(v));
    }
    return s;
}

double analytic_prevalence(const SynthSpec& spec) {
    spec.validate();
    const Model m = compile(spec);
    const auto& vars = spec.schema.variables;

    // Variables carrying a coefficient, and the latent factors they or the
    // outcome depend on.
    std::vector<std::size_t> involved;
    auto add = [&](const Factor& f) {
        if (f.category < 0) {
            fail(ErrorCode::InvalidArgument, "analytic prevalence needs categorical factors; '" +
                                                 vars[f.variable].name + "' is continuous");
        }
        if (std::find(involved.begin(), involved.end(), f.variable) == involved.end()) {
            involved.push_back(f.variable);
        }
    };
    for (const auto& [f, b] : m.main) add(f);
    for (const auto& [a, c, b] : m.inter) {
        add(a);
        add(c);
    }
    std::vector<std::size_t> latent_groups;
    for (const auto& [g, b] : m.latent) latent_groups.push_back(g);
    if (spec.latent_share > 0.0) {
        for (std::size_t v : involved) {
            if (std::find(latent_groups.begin(), latent_groups.end(), m.group_of[v]) ==
                latent_groups.end()) {
                latent_groups.push_back(m.group_of[v]);
            }
        }
    }
    if (involved.size() + latent_groups.size() > 24) {
        fail(ErrorCode::InvalidArgument, "too many factors to enumerate");
    }

    std::vector<int> cat(vars.size(), 0);
    std::vector<double> raw(vars.size(), 0.0);
    std::vector<int> latent(m.groups.size(), 0);
    const std::uint64_t latent_states = 1ULL << latent_groups.size();
    double total = 0.0;
    for (std::uint64_t zs = 0; zs < latent_states; ++zs) {
        for (std::size_t k = 0; k < latent_groups.size(); ++k) {
            latent[latent_groups[k]] = static_cast<int>((zs >> k) & 1U);
        }
        const double pz = 1.0 / static_cast<double>(latent_states);
        // Mixed-radix enumeration over the involved variables' categories.
        std::vector<int> state(involved.size(), 0);
        while (true) {
            double px = pz;
            for (std::size_t k = 0; k < involved.size(); ++k) {
                const std::size_t j = involved[k];
                const auto& v = vars[j];
                const int c = state[k];
                cat[j] = c;
                const int levels = static_cast<int>(v.categories.size());
                double independent;
                if (v.kind == VariableKind::binary) {
                    independent = c == 1 ? m.marginal[j] : 1.0 - m.marginal[j];
                } else {
                    independent = 1.0 / levels;
                }
                const int copied = v.kind == VariableKind::binary
                                       ? latent[m.group_of[j]]
                                       : (latent[m.group_of[j]] ? levels - 1 : 0);
                px *= (1.0 - spec.latent_share) * independent +
                      spec.latent_share * (c == copied ? 1.0 : 0.0);
            }
            total += px * BinomialLoss::link(linear_predictor(m, spec.intercept, cat, raw, latent));
            std::size_t k = 0;
            for (; k < involved.size(); ++k) {
                if (++state[k] < static_cast<int>(vars[involved[k]].categories.size())) {
                    break;
                }
                state[k] = 0;
            }
            if (k == involved.size()) {
                break;
            }
        }
    }
    return total;
}

double median(std::vector<double> values) {
    if (values.empty()) {
        return 0.0;
    }
    std::sort(values.begin(), values.end());
    const std::size_t h = values.size() / 2;
    return values.size() % 2 == 1 ? values[h] : 0.5 * (values[h - 1] + values[h]);
}

NullStudyReport null_interaction_study(const NullStudyOptions& options) {
    if (options.p < 4) {
        fail(ErrorCode::InvalidArgument, "null interaction study needs p >= 4");
    }
    if (options.n_moderators < 1) {
        fail(ErrorCode::InvalidArgument, "null interaction study needs a moderator");
    }
    NullStudyReport report;
    std::vector<double> a;
    std::vector<double> b;
    for (std::uint64_t seed : options.seeds) {
        SynthSpec spec;
        spec.n = options.n;
        spec.schema = make_synth_schema(options.p, options.n_moderators, options.group_size);
        spec.seed = seed;
        for (int j = 0; j < std::min(options.signal, options.p); ++j) {
            spec.beta_main["x" + std::to_string(j + 1)] = (j % 2 == 0 ? 1.0 : -1.0) * options.beta_main;
        }
        const auto data = generate(spec);
        const auto prepared = prepare(spec.schema, data.table, true);

        NullStudyRow row;
        row.seed = seed;
        ModelOptions mo = options.model;
        mo.seed = seed;
        mo.model = ModelKind::mb_int;
        row.mb_int = selected_interactions(run_experiment(prepared, spec.schema, mo).model.fit);
        mo.model = ModelKind::two_boost;
        row.two_boost = selected_interactions(run_experiment(prepared, spec.schema, mo).model.fit);
        a.push_back(row.mb_int);
        b.push_back(row.two_boost);
        report.rows.push_back(row);
    }
    report.median_mb_int = median(a);
    report.median_two_boost = median(b);
    return report;
}

}  // namespace sgboost
