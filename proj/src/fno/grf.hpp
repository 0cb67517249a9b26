#pragma once

#include "fno/field.hpp"
#include "fno/rng.hpp"

namespace fno {

enum class GrfBoundary { periodic, zero_neumann };
enum class GrfPushforward { none, threshold };

/// The Gaussian measure N(0, scale * (-Laplacian + tau I)^{-alpha}) with an
/// optional pointwise push-forward applied after sampling. Periodic samples
/// live on the torus grid x_j = j/s; zero-Neumann samples use the cosine
/// eigenbasis on the endpoint-inclusive grid x_j = j/(s-1).
struct GrfSpec {
    double scale = 1.0;
    double tau = 1.0;
    double alpha = 2.0;
    int dim = 1;
    GrfBoundary boundary = GrfBoundary::periodic;
    GrfPushforward push = GrfPushforward::none;
    double push_threshold = 0.0;   // psi(v) = above if v > threshold else below
    double push_above = 12.0;
    double push_below = 3.0;

    void validate() const;
};

/// Draw one sample on the given resolution. Spectral draws are keyed by
/// (stream, canonical frequency), so a fixed stream produces bit-identical
/// fields and agrees across resolutions on every mode both can resolve.
Field sample_grf(const GrfSpec& spec, const Shape& resolution, const RngStream& rng);

/// Per-mode standard deviation of the measure (the direct-summation oracle
/// uses this too): sqrt(scale) * (lambda_k + tau)^{-alpha/2}, with
/// lambda_k = 4 pi^2 |k|^2 on the torus and pi^2 |k|^2 in the cosine basis.
double grf_mode_std(const GrfSpec& spec, const Shape& freq);

/// Strided subsampling on shared grid points (no filtering). Per axis the
/// factor must divide the extent (torus grids) or the extent minus one
/// (endpoint-inclusive grids); the kept indices are 0, f, 2f, ...
/// Axes beyond factors.size() are left untouched.
Field downsample(const Field& field, const std::vector<int64_t>& factors);

} // namespace fno
