#pragma once

#include "fno/field.hpp"

namespace fno {

/// The retained low-frequency block: indices k with k_j <= kmax_j or
/// s_j - k_j <= kmax_j on every axis (the corners of the full spectrum).
/// `block` holds the per-axis retained counts in the half-spectrum storage:
/// min(2*kmax+1, s) on full axes, min(kmax+1, s/2+1) on the last axis.
struct ModeSet {
    Shape resolution;  // logical spatial extents the set was resolved for
    Shape kmax;        // per-axis cutoffs (possibly clamped, see mode_set)
    Shape block;       // per-axis stored retained counts

    int rank() const { return static_cast<int>(resolution.size()); }
    int64_t total() const { return shape_size(block); }

    /// Stored index on axis `axis` of block coordinate c. On full axes the
    /// block orders indices ascending: 0..kmax then s-kmax..s-1; on the last
    /// axis the block is simply 0..kmax.
    int64_t stored_index(int axis, int64_t c) const;

    /// Signed frequency of block coordinate c on axis `axis`.
    int64_t frequency(int axis, int64_t c) const;

    /// All retained full-spectrum multi-indices in lexicographic stored order.
    std::vector<Shape> logical_indices() const;

    /// All retained half-spectrum (stored) multi-indices, lexicographic.
    std::vector<Shape> stored_indices() const;
};

/// Resolve the retained mode set for a resolution. Cutoffs larger than the
/// axis allows (2*kmax+1 > s) are clamped to the available modes; `warn`
/// receives a message when that happens (defaults to stderr).
ModeSet mode_set(const Shape& resolution, const Shape& kmax);
ModeSet mode_set(const Shape& resolution, const Shape& kmax, void (*warn)(const std::string&));

/// Keep only the retained modes. The result is the same function expressed at
/// the minimal resolution holding them (extent min(2*kmax+1, s) per axis):
/// coefficients are rescaled by block_n/n so that idft reproduces the
/// low-frequency part of the original on the coarse grid. Truncated-block
/// coefficients of a band-limited field are therefore resolution-independent.
SpectralField truncate(const SpectralField& spec, const ModeSet& modes);

/// Zero-pad a spectrum onto a larger resolution, matching coefficients by
/// signed frequency and rescaling by target_n/n so the represented function is
/// unchanged: idft(embed(spec, t)) evaluates the band-limited interpolant on
/// the finer grid. This is the super-resolution mechanism; requires
/// target_j >= s_j for every axis.
SpectralField embed(const SpectralField& small, const Shape& target_resolution);

/// Low-pass filter: truncate to kmax then re-embed at the original resolution.
Field lowpass(const Field& field, int spatial_rank, const Shape& kmax);

} // namespace fno
