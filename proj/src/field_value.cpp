#include "qpass/field_value.hpp"

#include "qpass/csv.hpp"
#include "qpass/error.hpp"

namespace qpass {

void ValuationConfig::validate() const {
    if (!(s >= 0.0 && s <= 1.0)) throw config_error("shot value s must lie in [0, 1]");
    if (!(tolerance > 0.0)) throw config_error("solver tolerance must be positive");
    if (!(damping > 0.0 && damping <= 1.0)) throw config_error("damping must lie in (0, 1]");
    partition.validate();
}

SolveOptions ValuationConfig::solve_options(std::size_t c) const {
    SolveOptions opt;
    opt.method = c <= direct_max_clusters ? SolveMethod::direct : SolveMethod::iterative;
    opt.direct_limit = static_cast<Eigen::Index>(2 * direct_max_clusters);
    opt.tolerance = tolerance;
    opt.max_iterations = max_iterations;
    opt.damping = damping;
    return opt;
}

Eigen::Vector4d terminal_values(double s) { return {1.0, s, -1.0, -s}; }

namespace {

struct Side {
    std::size_t own_offset;    // state offset of the acting side's clusters
    std::size_t other_offset;  // state offset of the other side's clusters
    std::size_t goal;
    std::size_t shot;
};

void count_side(std::vector<Eigen::Triplet<double>>& trip, const Side& side, const std::vector<PassRecord>& passes,
                const std::vector<ClusterAssignment>& assignments, const std::vector<ShotRecord>& shots,
                const std::vector<std::size_t>& shot_clusters, const std::vector<std::optional<std::size_t>>& assists,
                std::size_t c) {
    if (assignments.size() != passes.size())
        throw validation_error("cluster assignments missing: " + std::to_string(assignments.size()) + " for " +
                               std::to_string(passes.size()) + " passes");
    if (shot_clusters.size() != shots.size())
        throw validation_error("cluster assignments missing for shots");

    auto add = [&](std::size_t from, std::size_t to) {
        trip.emplace_back(static_cast<int>(from), static_cast<int>(to), 1.0);
    };
    auto turnover_target = [&](const PassRecord& p, const ClusterAssignment& a) {
        if (!a.l_e)
            throw validation_error("pass " + p.match_id + "/" + std::to_string(p.seq) +
                                   " changes possession but has no l_e cluster");
        if (*a.l_e >= c) throw validation_error("l_e cluster out of range");
        return side.other_offset + *a.l_e;
    };

    for (std::size_t i = 0; i < passes.size(); ++i) {
        const auto& p = passes[i];
        const auto& a = assignments[i];
        if (a.c_s >= c || a.c_e >= c) throw validation_error("pass cluster out of range");
        if (p.successful) {
            add(side.own_offset + a.c_s, side.own_offset + a.c_e);
            if (p.is_last_of_possession && !p.possession_ends_in_shot)
                add(side.own_offset + a.c_e, turnover_target(p, a));
        } else {
            add(side.own_offset + a.c_s, turnover_target(p, a));
        }
    }
    for (std::size_t j = 0; j < shots.size(); ++j) {
        const auto k = shot_clusters[j];
        if (k >= c) throw validation_error("shot cluster out of range");
        add(side.own_offset + k, shots[j].is_goal ? side.goal : side.shot);
        if (assists[j]) add(side.own_offset + assignments.at(*assists[j]).c_e, side.own_offset + k);
    }
}

}  // namespace

TransitionSystem accumulate_transitions(const TeamPartition& partition, const TeamEventSet& events,
                                        const ValuationConfig& cfg) {
    TransitionSystem ts;
    ts.c = partition.c;
    ts.terminal = terminal_values(cfg.s);
    const std::size_t c = ts.c;

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(2 * (events.own_passes.size() + events.opp_passes.size()));
    count_side(trip, Side{0, c, ts.goal(), ts.shot()}, events.own_passes, partition.own_assignments,
               events.own_shots, partition.own_shot_clusters, events.own_shot_assists, c);
    count_side(trip, Side{c, 0, ts.conceded_goal(), ts.conceded_shot()}, events.opp_passes,
               partition.opp_assignments, events.opp_shots, partition.opp_shot_clusters, events.opp_shot_assists, c);

    ts.counts.resize(static_cast<Eigen::Index>(ts.states()), static_cast<Eigen::Index>(ts.states()));
    ts.counts.setFromTriplets(trip.begin(), trip.end());
    return ts;
}

double expected_transition_count(const TeamEventSet& events) {
    double total = 0;
    auto passes = [&](const std::vector<PassRecord>& ps) {
        for (const auto& p : ps) {
            total += 1;
            if (p.successful && p.is_last_of_possession && !p.possession_ends_in_shot) total += 1;
        }
    };
    passes(events.own_passes);
    passes(events.opp_passes);
    total += static_cast<double>(events.own_shots.size() + events.opp_shots.size());
    for (const auto& a : events.own_shot_assists) total += a ? 1 : 0;
    for (const auto& a : events.opp_shot_assists) total += a ? 1 : 0;
    return total;
}

StochasticMatrix normalize_rows(const TransitionSystem& ts) {
    StochasticMatrix out;
    out.c = ts.c;
    out.terminal = ts.terminal;
    out.P = ts.counts;
    out.dangling.assign(ts.states(), false);
    for (Eigen::Index k = 0; k < out.P.outerSize(); ++k) {
        double total = 0;
        for (SparseRows<double>::InnerIterator it(out.P, k); it; ++it) total += it.value();
        if (total > 0) {
            for (SparseRows<double>::InnerIterator it(out.P, k); it; ++it) it.valueRef() /= total;
        } else {
            out.dangling[static_cast<std::size_t>(k)] = true;
        }
    }
    return out;
}

FieldValues solve_field_values(const StochasticMatrix& P, const ValuationConfig& cfg, SolveMethod method) {
    auto opt = cfg.solve_options(P.c);
    opt.method = method;
    const Vector<double> payoff = P.terminal;
    auto sol = solve_absorbing(P.P, static_cast<Eigen::Index>(P.transient()), payoff, opt);

    FieldValues fv;
    fv.c = P.c;
    fv.s = P.terminal(1);
    // Values are convex combinations of payoffs in [-1, 1]; only rounding can leave that range.
    fv.values = sol.values.cwiseMax(-1.0).cwiseMin(1.0);
    fv.dangling = std::move(sol.dangling);
    fv.iterations = sol.iterations;
    fv.direct = sol.direct;
    fv.residual = sol.residual;
    return fv;
}

FieldValues solve_field_values(const StochasticMatrix& P, const ValuationConfig& cfg) {
    return solve_field_values(P, cfg, cfg.solve_options(P.c).method);
}

PointValues point_values(const TeamPartition& partition, const FieldValues& fv) {
    PointValues pv;
    for (const auto& a : partition.own_assignments) {
        pv.own_start.push_back(fv.own(a.c_s));
        pv.own_end.push_back(fv.own(a.c_e));
    }
    for (const auto& a : partition.opp_assignments) {
        pv.opp_start.push_back(fv.opp(a.c_s));
        pv.opp_end.push_back(fv.opp(a.c_e));
    }
    return pv;
}

TeamValuation run_team_valuation(const TeamEventSet& events, const ValuationConfig& cfg,
                                 const IterationObserver& observer) {
    cfg.validate();
    TeamValuation result;
    std::optional<PointValues> prev;
    std::size_t iteration = 0;
    for (const std::size_t c : cfg.partition.schedule()) {
        ++iteration;
        try {
            auto partition = build_partition(events, prev ? &*prev : nullptr, c, cfg.partition);
            auto ts = accumulate_transitions(partition, events, cfg);
            auto fv = solve_field_values(normalize_rows(ts), cfg);
            prev = point_values(partition, fv);
            if (observer) observer(c, partition, fv);
            result.partition = std::move(partition);
            result.values = std::move(fv);
            result.transitions = std::move(ts);
            result.iterations = iteration;
        } catch (const Error& e) {
            throw e.with_context("team " + events.team_id + ", iteration " + std::to_string(iteration) +
                                 " (c=" + std::to_string(c) + ")");
        }
    }
    return result;
}

void write_field_values_csv(std::ostream& out, const FieldValues& fv) {
    out << "state_kind,cluster_id,value\n";
    for (std::size_t k = 0; k < fv.c; ++k) out << "own," << k << ',' << csv::format_double(fv.own(k)) << '\n';
    for (std::size_t k = 0; k < fv.c; ++k) out << "opp," << k << ',' << csv::format_double(fv.opp(k)) << '\n';
}

void write_transitions_csv(std::ostream& out, const TransitionSystem& ts) {
    out << "row,col,count\n";
    for (Eigen::Index k = 0; k < ts.counts.outerSize(); ++k) {
        for (SparseRows<double>::InnerIterator it(ts.counts, k); it; ++it)
            out << it.row() << ',' << it.col() << ',' << csv::format_double(it.value()) << '\n';
    }
}

}  // namespace qpass
