#pragma once

/**
 * @file core.hpp
 * @brief Domain types for multiobjective MDPs: vector rewards, Pareto and
 *        Lorenz dominance, occupation measures, and exact policy evaluation.
 *
 * All types are immutable after construction and safe to share across
 * threads; the operations below are pure functions.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace fairmomdp {

/// Expected discounted total reward per objective. Components are >= 0.
using ValueVector = std::vector<double>;

/// A computation exceeded its configured budget (nodes, iterations, size).
struct ResourceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A model violates one of its structural invariants.
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace tol {
inline constexpr double probability = 1e-9;  // row sums of p and mu
inline constexpr double flow = 1e-6;         // occupation flow residual
inline constexpr double evaluation = 1e-8;   // Bellman residual of evaluate_policy
inline constexpr double dedup = 1e-9;        // value deduplication
}  // namespace tol

/**
 * @brief Cumulative sums of a nonnegative vector's components sorted
 *        ascending; component k is the sum of the k smallest source entries.
 *
 * Invariants: components are nondecreasing, increments are nondecreasing,
 * and the last component equals the sum of the source vector.
 */
struct LorenzVector {
    std::vector<double> components;

    std::size_t size() const { return components.size(); }
    double operator[](std::size_t k) const { return components[k]; }
    double total() const { return components.empty() ? 0.0 : components.back(); }

    friend bool operator==(const LorenzVector& a, const LorenzVector& b) {
        return a.components == b.components;
    }
};

/// @returns the Lorenz vector of v. @throws std::domain_error on negative components.
inline LorenzVector lorenz_vector(const ValueVector& v) {
    for (double c : v)
        if (c < 0.0) throw std::domain_error("lorenz_vector: negative component");
    std::vector<double> sorted(v);
    std::sort(sorted.begin(), sorted.end());
    double run = 0.0;
    for (double& c : sorted) {
        run += c;
        c = run;
    }
    return LorenzVector{std::move(sorted)};
}

namespace detail {
inline void require_same_length(std::size_t a, std::size_t b, const char* who) {
    if (a != b) throw std::domain_error(std::string(who) + ": length mismatch");
}
}  // namespace detail

/// Weak componentwise dominance; with strict=true additionally requires one
/// strictly greater component.
inline bool pareto_dominates(const ValueVector& v, const ValueVector& w, bool strict) {
    detail::require_same_length(v.size(), w.size(), "pareto_dominates");
    bool any_strict = false;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] < w[i]) return false;
        if (v[i] > w[i]) any_strict = true;
    }
    return strict ? any_strict : true;
}

/// v eps-dominates w when (1+eps)*v_i >= w_i for every i.
inline bool eps_pareto_dominates(const ValueVector& v, const ValueVector& w, double eps) {
    if (eps < 0.0) throw std::domain_error("eps_pareto_dominates: negative epsilon");
    detail::require_same_length(v.size(), w.size(), "eps_pareto_dominates");
    for (std::size_t i = 0; i < v.size(); ++i)
        if ((1.0 + eps) * v[i] < w[i]) return false;
    return true;
}

/// Pareto dominance applied to Lorenz vectors.
inline bool lorenz_dominates(const ValueVector& v, const ValueVector& w, bool strict) {
    detail::require_same_length(v.size(), w.size(), "lorenz_dominates");
    return pareto_dominates(lorenz_vector(v).components, lorenz_vector(w).components, strict);
}

inline bool eps_lorenz_dominates(const ValueVector& v, const ValueVector& w, double eps) {
    detail::require_same_length(v.size(), w.size(), "eps_lorenz_dominates");
    return eps_pareto_dominates(lorenz_vector(v).components, lorenz_vector(w).components, eps);
}

namespace detail {
template <typename StrictDom>
std::vector<ValueVector> nondominated(const std::vector<ValueVector>& xs, StrictDom dom) {
    std::vector<ValueVector> kept;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        bool dominated = false;
        for (std::size_t j = 0; j < xs.size() && !dominated; ++j)
            dominated = (j != i) && dom(xs[j], xs[i]);
        if (!dominated) kept.push_back(xs[i]);
    }
    return kept;
}
}  // namespace detail

/// Strictly Pareto-nondominated subset (pairwise scan, desk scale).
inline std::vector<ValueVector> pnd_filter(const std::vector<ValueVector>& xs) {
    return detail::nondominated(
        xs, [](const ValueVector& a, const ValueVector& b) { return pareto_dominates(a, b, true); });
}

/// Strictly Lorenz-nondominated subset; always a subset of pnd_filter(xs).
inline std::vector<ValueVector> lnd_filter(const std::vector<ValueVector>& xs) {
    std::vector<LorenzVector> lor;
    lor.reserve(xs.size());
    for (const auto& x : xs) lor.push_back(lorenz_vector(x));
    std::vector<ValueVector> kept;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        bool dominated = false;
        for (std::size_t j = 0; j < xs.size() && !dominated; ++j)
            dominated = (j != i) && pareto_dominates(lor[j].components, lor[i].components, true);
        if (!dominated) kept.push_back(xs[i]);
    }
    return kept;
}

/**
 * @brief Admissible (Pigou-Dalton) transfer of `amount` from component i to
 *        component j. Requires v[i] > v[j] and 0 < amount <= v[i] - v[j].
 *
 * Indices are zero-based. The component sum is preserved exactly.
 */
inline ValueVector pigou_dalton_transfer(const ValueVector& v, std::size_t i, std::size_t j,
                                         double amount) {
    if (i >= v.size() || j >= v.size() || i == j)
        throw std::domain_error("pigou_dalton_transfer: bad indices");
    if (!(v[i] > v[j])) throw std::domain_error("pigou_dalton_transfer: v[i] must exceed v[j]");
    if (!(amount > 0.0) || amount > v[i] - v[j])
        throw std::domain_error("pigou_dalton_transfer: amount out of (0, v[i]-v[j]]");
    ValueVector out(v);
    out[i] -= amount;
    out[j] += amount;
    return out;
}

/// Stationary policy: one action per state, or a distribution over actions per state.
class Policy {
  public:
    static Policy deterministic(std::vector<int> actions) {
        Policy p;
        p.actions_ = std::move(actions);
        return p;
    }

    static Policy randomized(std::vector<std::vector<double>> rows) {
        for (const auto& row : rows) {
            double sum = std::accumulate(row.begin(), row.end(), 0.0);
            if (std::abs(sum - 1.0) > tol::probability)
                throw ValidationError("Policy: randomized row must sum to 1");
            for (double q : row)
                if (q < 0.0) throw ValidationError("Policy: negative action probability");
        }
        Policy p;
        p.rows_ = std::move(rows);
        return p;
    }

    bool is_deterministic() const { return !actions_.empty(); }
    int num_states() const {
        return is_deterministic() ? static_cast<int>(actions_.size())
                                  : static_cast<int>(rows_.size());
    }

    int action(int s) const { return actions_.at(static_cast<std::size_t>(s)); }

    double prob(int s, int a) const {
        if (is_deterministic()) return actions_[static_cast<std::size_t>(s)] == a ? 1.0 : 0.0;
        return rows_[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)];
    }

  private:
    Policy() = default;
    std::vector<int> actions_;                // deterministic form
    std::vector<std::vector<double>> rows_;   // randomized form
};

/**
 * @brief Finite discounted MOMDP with an n-dimensional nonnegative reward
 *        per state-action pair and an initial state distribution.
 */
class Momdp {
  public:
    /**
     * @param transition flat row-major p[(s*A + a)*S + s2]
     * @param reward     flat row-major r[(s*A + a)*n + i], all >= 0
     */
    Momdp(int num_states, int num_actions, int num_objectives, double discount,
          std::vector<double> transition, std::vector<double> reward,
          std::vector<double> initial_dist)
        : num_states_(num_states),
          num_actions_(num_actions),
          num_objectives_(num_objectives),
          discount_(discount),
          transition_(std::move(transition)),
          reward_(std::move(reward)),
          initial_dist_(std::move(initial_dist)) {
        validate();
    }

    int num_states() const { return num_states_; }
    int num_actions() const { return num_actions_; }
    int num_objectives() const { return num_objectives_; }
    double discount() const { return discount_; }
    const std::vector<double>& initial_dist() const { return initial_dist_; }

    double transition(int s, int a, int s2) const {
        return transition_[(static_cast<std::size_t>(s) * num_actions_ + a) * num_states_ + s2];
    }
    double reward(int s, int a, int objective) const {
        return reward_[(static_cast<std::size_t>(s) * num_actions_ + a) * num_objectives_ +
                       objective];
    }

    ValueVector reward_vector(int s, int a) const {
        ValueVector r(static_cast<std::size_t>(num_objectives_));
        for (int i = 0; i < num_objectives_; ++i) r[static_cast<std::size_t>(i)] = reward(s, a, i);
        return r;
    }

    double max_reward_component() const {
        return reward_.empty() ? 0.0 : *std::max_element(reward_.begin(), reward_.end());
    }

    /// Tight upper bound on any achievable value component.
    double value_bound() const { return max_reward_component() / (1.0 - discount_); }

  private:
    void validate() const {
        if (num_states_ <= 0) throw ValidationError("Momdp: num_states must be positive");
        if (num_actions_ <= 0) throw ValidationError("Momdp: num_actions must be positive");
        if (num_objectives_ < 2) throw ValidationError("Momdp: num_objectives must be >= 2");
        if (!(discount_ > 0.0 && discount_ < 1.0))
            throw ValidationError("Momdp: discount must lie in (0,1)");
        const std::size_t sa = static_cast<std::size_t>(num_states_) * num_actions_;
        if (transition_.size() != sa * num_states_)
            throw ValidationError("Momdp: transition table has wrong size");
        if (reward_.size() != sa * num_objectives_)
            throw ValidationError("Momdp: reward table has wrong size");
        if (initial_dist_.size() != static_cast<std::size_t>(num_states_))
            throw ValidationError("Momdp: initial_dist has wrong size");
        for (int s = 0; s < num_states_; ++s)
            for (int a = 0; a < num_actions_; ++a) {
                double sum = 0.0;
                for (int s2 = 0; s2 < num_states_; ++s2) {
                    double p = transition(s, a, s2);
                    if (p < 0.0) throw ValidationError("Momdp: negative transition probability");
                    sum += p;
                }
                if (std::abs(sum - 1.0) > tol::probability)
                    throw ValidationError("Momdp: transition row must sum to 1");
            }
        double mu_sum = 0.0;
        for (double mu : initial_dist_) {
            if (mu < 0.0) throw ValidationError("Momdp: negative initial probability");
            mu_sum += mu;
        }
        if (std::abs(mu_sum - 1.0) > tol::probability)
            throw ValidationError("Momdp: initial_dist must sum to 1");
        for (double r : reward_)
            if (r < 0.0) throw ValidationError("Momdp: rewards must be nonnegative");
    }

    int num_states_;
    int num_actions_;
    int num_objectives_;
    double discount_;
    std::vector<double> transition_;    // p[(s*A + a)*S + s2]
    std::vector<double> reward_;        // r[(s*A + a)*n + i]
    std::vector<double> initial_dist_;  // mu[s]
};

/// Expected discounted visit frequencies x_sa, with the discount and initial
/// distribution they were produced under.
struct OccupationMeasure {
    std::vector<double> x;  // x[(s*A) + a]
    double discount = 0.0;
    std::vector<double> initial_dist;

    double total_mass() const { return std::accumulate(x.begin(), x.end(), 0.0); }

    /// Max absolute flow-conservation residual over states.
    double flow_residual(const Momdp& m) const {
        double worst = 0.0;
        const int S = m.num_states(), A = m.num_actions();
        for (int s = 0; s < S; ++s) {
            double out = 0.0;
            for (int a = 0; a < A; ++a) out += x[static_cast<std::size_t>(s) * A + a];
            double in = 0.0;
            for (int s2 = 0; s2 < S; ++s2)
                for (int a = 0; a < A; ++a)
                    in += x[static_cast<std::size_t>(s2) * A + a] * m.transition(s2, a, s);
            worst = std::max(worst, std::abs(out - m.discount() * in - initial_dist[s]));
        }
        return worst;
    }

    bool satisfies_flow_invariants(const Momdp& m) const {
        for (double xi : x)
            if (xi < -1e-12) return false;
        return flow_residual(m) <= tol::flow;
    }
};

namespace detail {

/// Solves A * X = B in place by Gaussian elimination with partial pivoting.
/// A is row-major k x k, B is row-major k x nrhs; the solution lands in B.
inline void solve_dense(std::vector<double>& A, std::vector<double>& B, int k, int nrhs) {
    for (int col = 0; col < k; ++col) {
        int pivot = col;
        double best = std::abs(A[static_cast<std::size_t>(col) * k + col]);
        for (int r = col + 1; r < k; ++r) {
            double cand = std::abs(A[static_cast<std::size_t>(r) * k + col]);
            if (cand > best) {
                best = cand;
                pivot = r;
            }
        }
        if (best == 0.0) throw std::runtime_error("solve_dense: singular matrix");
        if (pivot != col) {
            for (int c = 0; c < k; ++c)
                std::swap(A[static_cast<std::size_t>(pivot) * k + c],
                          A[static_cast<std::size_t>(col) * k + c]);
            for (int c = 0; c < nrhs; ++c)
                std::swap(B[static_cast<std::size_t>(pivot) * nrhs + c],
                          B[static_cast<std::size_t>(col) * nrhs + c]);
        }
        const double inv = 1.0 / A[static_cast<std::size_t>(col) * k + col];
        for (int r = col + 1; r < k; ++r) {
            double f = A[static_cast<std::size_t>(r) * k + col] * inv;
            if (f == 0.0) continue;
            for (int c = col; c < k; ++c)
                A[static_cast<std::size_t>(r) * k + c] -= f * A[static_cast<std::size_t>(col) * k + c];
            for (int c = 0; c < nrhs; ++c)
                B[static_cast<std::size_t>(r) * nrhs + c] -= f * B[static_cast<std::size_t>(col) * nrhs + c];
        }
    }
    for (int col = k - 1; col >= 0; --col) {
        const double inv = 1.0 / A[static_cast<std::size_t>(col) * k + col];
        for (int c = 0; c < nrhs; ++c) {
            double v = B[static_cast<std::size_t>(col) * nrhs + c];
            for (int r = col + 1; r < k; ++r)
                v -= A[static_cast<std::size_t>(col) * k + r] * B[static_cast<std::size_t>(r) * nrhs + c];
            B[static_cast<std::size_t>(col) * nrhs + c] = v * inv;
        }
    }
}

}  // namespace detail

/// States above this size switch evaluate_policy from a direct solve to
/// fixed-point iteration.
inline constexpr int kDirectSolveStateLimit = 512;

/**
 * @brief Solves the vector Bellman equation for a fixed policy.
 *
 * Uses one dense linear solve for up to kDirectSolveStateLimit states and
 * fixed-point iteration (sup-norm change <= 1e-10) beyond that. The result
 * satisfies the Bellman equation with residual <= tol::evaluation.
 *
 * @returns per-state value vectors, indexed [state][objective].
 */
inline std::vector<ValueVector> evaluate_policy(const Momdp& m, const Policy& pi) {
    const int S = m.num_states(), A = m.num_actions(), n = m.num_objectives();
    if (pi.num_states() != S) throw ValidationError("evaluate_policy: policy size mismatch");

    // P_pi and r_pi under the policy's action mix.
    std::vector<double> P(static_cast<std::size_t>(S) * S, 0.0);
    std::vector<double> R(static_cast<std::size_t>(S) * n, 0.0);
    for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a) {
            const double w = pi.prob(s, a);
            if (w == 0.0) continue;
            for (int s2 = 0; s2 < S; ++s2)
                P[static_cast<std::size_t>(s) * S + s2] += w * m.transition(s, a, s2);
            for (int i = 0; i < n; ++i)
                R[static_cast<std::size_t>(s) * n + i] += w * m.reward(s, a, i);
        }

    std::vector<double> V;
    if (S <= kDirectSolveStateLimit) {
        // (I - gamma * P_pi) V = r_pi, all objectives in one factorization
        std::vector<double> Asys(static_cast<std::size_t>(S) * S);
        for (int r = 0; r < S; ++r)
            for (int c = 0; c < S; ++c)
                Asys[static_cast<std::size_t>(r) * S + c] =
                    (r == c ? 1.0 : 0.0) - m.discount() * P[static_cast<std::size_t>(r) * S + c];
        V = R;
        detail::solve_dense(Asys, V, S, n);
    } else {
        V.assign(static_cast<std::size_t>(S) * n, 0.0);
        std::vector<double> next(V.size());
        for (;;) {
            double change = 0.0;
            for (int s = 0; s < S; ++s)
                for (int i = 0; i < n; ++i) {
                    double acc = R[static_cast<std::size_t>(s) * n + i];
                    for (int s2 = 0; s2 < S; ++s2)
                        acc += m.discount() * P[static_cast<std::size_t>(s) * S + s2] *
                               V[static_cast<std::size_t>(s2) * n + i];
                    next[static_cast<std::size_t>(s) * n + i] = acc;
                    change = std::max(change, std::abs(acc - V[static_cast<std::size_t>(s) * n + i]));
                }
            V.swap(next);
            if (change <= 1e-10) break;
        }
    }

    std::vector<ValueVector> out(static_cast<std::size_t>(S), ValueVector(static_cast<std::size_t>(n)));
    for (int s = 0; s < S; ++s)
        for (int i = 0; i < n; ++i)
            out[static_cast<std::size_t>(s)][static_cast<std::size_t>(i)] =
                V[static_cast<std::size_t>(s) * n + i];
    return out;
}

/// mu-weighted aggregate of a per-state value table.
inline ValueVector aggregate_value(const Momdp& m, const std::vector<ValueVector>& per_state) {
    ValueVector z(static_cast<std::size_t>(m.num_objectives()), 0.0);
    for (int s = 0; s < m.num_states(); ++s)
        for (int i = 0; i < m.num_objectives(); ++i)
            z[static_cast<std::size_t>(i)] +=
                m.initial_dist()[static_cast<std::size_t>(s)] *
                per_state[static_cast<std::size_t>(s)][static_cast<std::size_t>(i)];
    return z;
}

/// Value of a policy from the initial distribution.
inline ValueVector policy_value(const Momdp& m, const Policy& pi) {
    return aggregate_value(m, evaluate_policy(m, pi));
}

/**
 * @brief Normalizes an occupation measure into the policy it encodes,
 *        pi(s,a) = x_sa / sum_a x_sa.
 *
 * States with no mass (unreachable under mu) get the lowest-indexed action;
 * the choice does not affect the value.
 */
inline Policy occupation_to_policy(const OccupationMeasure& occ, int num_states, int num_actions) {
    std::vector<std::vector<double>> rows(static_cast<std::size_t>(num_states));
    bool all_deterministic = true;
    std::vector<int> actions(static_cast<std::size_t>(num_states), 0);
    for (int s = 0; s < num_states; ++s) {
        double mass = 0.0;
        for (int a = 0; a < num_actions; ++a)
            mass += occ.x[static_cast<std::size_t>(s) * num_actions + a];
        std::vector<double> row(static_cast<std::size_t>(num_actions), 0.0);
        if (mass <= 1e-9) {
            row[0] = 1.0;
        } else {
            int positive = 0, last = 0;
            for (int a = 0; a < num_actions; ++a) {
                double q = std::max(0.0, occ.x[static_cast<std::size_t>(s) * num_actions + a]) / mass;
                row[static_cast<std::size_t>(a)] = q;
                if (q > 0.0) {
                    ++positive;
                    last = a;
                }
            }
            if (positive == 1) {
                row.assign(static_cast<std::size_t>(num_actions), 0.0);
                row[static_cast<std::size_t>(last)] = 1.0;
                actions[static_cast<std::size_t>(s)] = last;
            } else {
                all_deterministic = false;
            }
        }
        rows[static_cast<std::size_t>(s)] = std::move(row);
    }
    if (all_deterministic) return Policy::deterministic(std::move(actions));
    return Policy::randomized(std::move(rows));
}

/// z_i = sum_{s,a} r_i(s,a) * x_sa.
inline ValueVector occupation_value(const Momdp& m, const OccupationMeasure& occ) {
    ValueVector z(static_cast<std::size_t>(m.num_objectives()), 0.0);
    for (int s = 0; s < m.num_states(); ++s)
        for (int a = 0; a < m.num_actions(); ++a) {
            const double mass = occ.x[static_cast<std::size_t>(s) * m.num_actions() + a];
            if (mass == 0.0) continue;
            for (int i = 0; i < m.num_objectives(); ++i)
                z[static_cast<std::size_t>(i)] += m.reward(s, a, i) * mass;
        }
    return z;
}

}  // namespace fairmomdp
