#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "fno/common.hpp"

namespace fno {

using Shape = std::vector<int64_t>;

int64_t shape_size(const Shape& shape);
std::string shape_str(const Shape& shape);

/// Dense real array on an implicit uniform grid over the unit torus/box.
/// Layout is row-major with spatial axes leading; trailing axes (channels,
/// time) vary fastest. Extents must all be >= 1.
class Field {
public:
    Field() = default;
    explicit Field(Shape shape, double fill = 0.0);
    Field(Shape shape, std::vector<double> data);

    const Shape& shape() const { return shape_; }
    int rank() const { return static_cast<int>(shape_.size()); }
    int64_t extent(int axis) const { return shape_[static_cast<size_t>(axis)]; }
    int64_t size() const { return static_cast<int64_t>(data_.size()); }
    bool empty() const { return data_.empty(); }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    std::vector<double>& values() { return data_; }
    const std::vector<double>& values() const { return data_; }

    double& operator[](int64_t i) { return data_[static_cast<size_t>(i)]; }
    double operator[](int64_t i) const { return data_[static_cast<size_t>(i)]; }

    double& at(const Shape& index) { return data_[static_cast<size_t>(flat_index(index))]; }
    double at(const Shape& index) const { return data_[static_cast<size_t>(flat_index(index))]; }
    int64_t flat_index(const Shape& index) const;

    bool all_finite() const;
    double l2_norm() const;
    double max_abs() const;
    double mean() const;

private:
    Shape shape_;
    std::vector<double> data_;
};

/// Complex Fourier coefficients of a Field. The leading `spatial_rank` axes of
/// a transformed field are replaced by their frequency axes; the last spatial
/// axis stores only the non-negative frequencies 0..floor(s/2) (real-input
/// convention), so conjugate symmetry along that axis is structural. The
/// logical extent of the halved axis is kept so the inverse is well defined.
class SpectralField {
public:
    SpectralField() = default;
    SpectralField(Shape stored_shape, int spatial_rank, int64_t last_logical_extent);

    const Shape& shape() const { return shape_; }
    int rank() const { return static_cast<int>(shape_.size()); }
    int64_t extent(int axis) const { return shape_[static_cast<size_t>(axis)]; }
    int spatial_rank() const { return spatial_rank_; }
    int64_t last_logical_extent() const { return last_logical_; }

    /// Logical spatial extents (full spectrum), i.e. the grid shape of idft().
    Shape logical_spatial() const;
    /// Number of grid points n = prod of logical spatial extents.
    int64_t logical_spatial_size() const;
    /// Product of trailing (non-spatial) extents.
    int64_t channel_size() const;
    /// Product of stored spatial extents.
    int64_t stored_spatial_size() const;

    int64_t size() const { return static_cast<int64_t>(data_.size()); }
    std::complex<double>* data() { return data_.data(); }
    const std::complex<double>* data() const { return data_.data(); }

    std::complex<double>& operator[](int64_t i) { return data_[static_cast<size_t>(i)]; }
    const std::complex<double>& operator[](int64_t i) const { return data_[static_cast<size_t>(i)]; }

    int64_t flat_index(const Shape& index) const;
    std::complex<double>& at(const Shape& index) { return data_[static_cast<size_t>(flat_index(index))]; }
    const std::complex<double>& at(const Shape& index) const {
        return data_[static_cast<size_t>(flat_index(index))];
    }

private:
    Shape shape_;   // stored extents: spatial (last one halved), then trailing axes
    int spatial_rank_ = 0;
    int64_t last_logical_ = 0;
    std::vector<std::complex<double>> data_;
};

void check_finite(const Field& f, const char* context);

/// Signed frequency of stored index i on a full-spectrum axis of extent s:
/// i <= s/2 maps to i, otherwise to i - s.
inline int64_t signed_frequency(int64_t index, int64_t extent) {
    return (2 * index <= extent) ? index : index - extent;
}

} // namespace fno
