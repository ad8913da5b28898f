#pragma once

#include <span>
#include <vector>

#include "attention.hpp"
#include "toy_diffusion.hpp"

namespace bansa {

// Mean Frobenius distance over all unordered pairs.
double pairwise_attention_distance(std::span<const AttentionMap> maps);

// Root-mean-square entry distance between two trajectories of equal shape,
// and its mean over all unordered pairs.
double trajectory_distance(const TrajectoryRecord& a, const TrajectoryRecord& b);
double pairwise_trajectory_distance(std::span<const TrajectoryRecord> trajectories);

// Second-order low-pass Butterworth along the step axis per latent
// coordinate, then the mean squared first difference of the filtered
// sequences. cutoff is a normalized frequency in (0, 0.5).
double trajectory_variation(const TrajectoryRecord& trajectory, double cutoff);

// Sample variance of the entries of each token row, averaged over rows.
double intra_frame_variance(const LatentState& state);

struct GroupDistanceSummary {
    double intra_low = 0.0;
    double intra_high = 0.0;
    double cross = 0.0;
};

// Intra-group mean pairwise distances plus the mean distance across groups.
GroupDistanceSummary group_summary(std::span<const AttentionMap> low_group,
                                   std::span<const AttentionMap> high_group);

}  // namespace bansa
