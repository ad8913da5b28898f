#include "acquisition.hpp"

#include <cmath>

#include "errors.hpp"

namespace bansa {

std::string_view to_string(ScoreKind kind) {
    switch (kind) {
        case ScoreKind::entropy: return "entropy";
        case ScoreKind::bansa: return "bansa";
        case ScoreKind::bansa_e: return "bansa_e";
        case ScoreKind::bald_reference: return "bald_reference";
    }
    return "unknown";
}

DiscreteDistribution DiscreteDistribution::validated(std::vector<double> probs) {
    if (probs.empty()) {
        fail(ErrorCode::invalid_input, "distribution must have at least one outcome");
    }
    double sum = 0.0;
    for (double p : probs) {
        if (!(p >= 0.0) || !std::isfinite(p)) {
            fail(ErrorCode::invalid_input, "distribution entries must be finite and nonnegative");
        }
        sum += p;
    }
    if (std::fabs(sum - 1.0) > 1e-9) {
        fail(ErrorCode::invalid_input, "distribution must sum to 1 within 1e-9");
    }
    return DiscreteDistribution(std::move(probs));
}

namespace {

bool all_samples_identical(const AttentionEnsemble& ensemble) {
    for (std::size_t s = 1; s < ensemble.k(); ++s) {
        if (!(ensemble.samples[s] == ensemble.samples[0])) return false;
    }
    return true;
}

void require_uniform_shape(const AttentionEnsemble& ensemble) {
    if (ensemble.samples.empty()) {
        fail(ErrorCode::invalid_input, "ensemble must contain at least one sample");
    }
    for (const auto& s : ensemble.samples) {
        if (s.rows() != ensemble.rows() || s.cols() != ensemble.cols()) {
            fail(ErrorCode::shape_mismatch, "ensemble samples disagree in shape");
        }
    }
}

}  // namespace

AcquisitionScore bald_reference(const std::vector<DiscreteDistribution>& dists) {
    if (dists.empty()) {
        fail(ErrorCode::invalid_input, "bald_reference needs at least one distribution");
    }
    const std::size_t width = dists.front().size();
    for (const auto& d : dists) {
        if (d.size() != width) {
            fail(ErrorCode::shape_mismatch, "bald_reference: distribution lengths differ");
        }
    }
    AcquisitionScore score;
    score.kind = ScoreKind::bald_reference;
    score.k_used = dists.size();

    bool identical = true;
    for (std::size_t s = 1; s < dists.size(); ++s) {
        if (dists[s].probs() != dists[0].probs()) {
            identical = false;
            break;
        }
    }
    if (identical) {
        // Exact by the zero condition: no disagreement, no information gain.
        score.value = 0.0;
        return score;
    }

    const double inv_k = 1.0 / static_cast<double>(dists.size());
    std::vector<double> mean(width, 0.0);
    for (const auto& d : dists) {
        for (std::size_t j = 0; j < width; ++j) {
            mean[j] += d.probs()[j];
        }
    }
    for (double& v : mean) v *= inv_k;

    double mean_entropy = 0.0;
    for (const auto& d : dists) {
        mean_entropy += row_entropy(d.probs());
    }
    mean_entropy /= static_cast<double>(dists.size());

    score.value = row_entropy(mean) - mean_entropy;
    return score;
}

AttentionMap mean_map(const AttentionEnsemble& ensemble) {
    require_uniform_shape(ensemble);
    const double inv_k = 1.0 / static_cast<double>(ensemble.k());
    Matrix mean(ensemble.rows(), ensemble.cols());
    for (const auto& sample : ensemble.samples) {
        for (std::size_t i = 0; i < mean.size(); ++i) {
            mean.data()[i] += sample.matrix().data()[i];
        }
    }
    for (double& v : mean.data()) v *= inv_k;
    return AttentionMap::unchecked(std::move(mean));
}

AcquisitionScore bansa_score(const AttentionEnsemble& ensemble) {
    require_uniform_shape(ensemble);
    AcquisitionScore score;
    score.kind = ScoreKind::bansa;
    score.k_used = ensemble.k();
    score.layer = ensemble.source_layer;

    if (all_samples_identical(ensemble)) {
        // Exact by the zero condition; also keeps the K=1 and p=0 limits at
        // literal 0.0 instead of accumulation dust.
        score.value = 0.0;
        return score;
    }

    const AttentionMap mean = mean_map(ensemble);
    double mean_entropy = 0.0;
    for (const auto& sample : ensemble.samples) {
        mean_entropy += entropy(sample);
    }
    mean_entropy /= static_cast<double>(ensemble.k());

    score.value = entropy(mean) - mean_entropy;
    return score;
}

AcquisitionScore bansa_e(const AttentionMap& a, std::size_t k, double drop_prob,
                         RngStream stream) {
    AcquisitionScore score = bansa_score(make_ensemble(a, k, drop_prob, stream));
    score.kind = ScoreKind::bansa_e;
    return score;
}

AcquisitionScore predictive_entropy_score(const AttentionEnsemble& ensemble) {
    require_uniform_shape(ensemble);
    AcquisitionScore score;
    score.kind = ScoreKind::entropy;
    score.k_used = ensemble.k();
    score.layer = ensemble.source_layer;
    score.value = entropy(mean_map(ensemble));
    return score;
}

AttentionEnsemble jitter_ensemble(const Matrix& logits, std::size_t k,
                                  double noise_scale, RngStream stream) {
    if (k == 0) {
        fail(ErrorCode::invalid_input, "ensemble size must be at least 1");
    }
    if (!(noise_scale >= 0.0)) {
        fail(ErrorCode::invalid_input, "jitter scale must be nonnegative");
    }
    AttentionEnsemble ensemble;
    ensemble.samples.reserve(k);
    for (std::size_t sample = 0; sample < k; ++sample) {
        RngStream sub = stream.split(sample);
        Matrix noisy = logits;
        if (noise_scale > 0.0) {
            for (double& v : noisy.data()) {
                v += noise_scale * sub.next_gaussian();
            }
        }
        ensemble.samples.push_back(softmax_rows(noisy));
    }
    return ensemble;
}

}  // namespace bansa
