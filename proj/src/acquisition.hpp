#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "masking.hpp"

namespace bansa {

enum class ScoreKind { entropy, bansa, bansa_e, bald_reference };

std::string_view to_string(ScoreKind kind);

// A score always carries how it was produced so reports cannot silently mix
// variants computed with different K or stochasticity sources.
struct AcquisitionScore {
    double value = 0.0;  // nats
    ScoreKind kind = ScoreKind::bansa;
    std::size_t k_used = 0;
    std::size_t layer = 0;
};

class DiscreteDistribution {
public:
    static DiscreteDistribution validated(std::vector<double> probs);
    const std::vector<double>& probs() const { return probs_; }
    std::size_t size() const { return probs_.size(); }

private:
    explicit DiscreteDistribution(std::vector<double> p) : probs_(std::move(p)) {}
    std::vector<double> probs_;
};

// Classic disagreement score on predictive distributions:
// H(mean of dists) - mean of H(dist). Kept as an independently coded
// reference so single-row attention scoring can be cross-checked against it.
AcquisitionScore bald_reference(const std::vector<DiscreteDistribution>& dists);

// Entropy of the element-wise mean map minus the mean of per-sample
// entropies. Zero exactly when all samples are identical; nonnegative by
// concavity of entropy.
AcquisitionScore bansa_score(const AttentionEnsemble& ensemble);

// Single-pass surrogate: score a Bernoulli-masked ensemble built from one map.
AcquisitionScore bansa_e(const AttentionMap& a, std::size_t k, double drop_prob,
                         RngStream stream);

// First term only: entropy of the mean map (the baseline acquisition).
AcquisitionScore predictive_entropy_score(const AttentionEnsemble& ensemble);

// Element-wise mean of the samples; row-stochastic by construction.
AttentionMap mean_map(const AttentionEnsemble& ensemble);

// Alternate stochasticity source: K softmaxes of the same logits with
// Gaussian jitter added. Stands in for dropout-style perturbation; no claim
// of equivalence to perturbing network weights.
AttentionEnsemble jitter_ensemble(const Matrix& logits, std::size_t k,
                                  double noise_scale, RngStream stream);

}  // namespace bansa
