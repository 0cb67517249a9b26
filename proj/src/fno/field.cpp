#include "fno/field.hpp"

#include <cmath>
#include <numeric>

namespace fno {

int64_t shape_size(const Shape& shape) {
    int64_t n = 1;
    for (int64_t e : shape) n *= e;
    return n;
}

std::string shape_str(const Shape& shape) {
    std::string s = "(";
    for (size_t i = 0; i < shape.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(shape[i]);
    }
    s += ")";
    return s;
}

namespace {
void validate_shape(const Shape& shape) {
    FNO_REQUIRE(!shape.empty(), DataError, "field shape must have at least one axis");
    for (int64_t e : shape)
        FNO_REQUIRE(e >= 1, DataError, "field extents must be >= 1, got ", shape_str(shape));
}
} // namespace

Field::Field(Shape shape, double fill) : shape_(std::move(shape)) {
    validate_shape(shape_);
    data_.assign(static_cast<size_t>(shape_size(shape_)), fill);
}

Field::Field(Shape shape, std::vector<double> data) : shape_(std::move(shape)), data_(std::move(data)) {
    validate_shape(shape_);
    FNO_REQUIRE(static_cast<int64_t>(data_.size()) == shape_size(shape_), DataError,
                "field data length ", data_.size(), " does not match shape ", shape_str(shape_));
}

int64_t Field::flat_index(const Shape& index) const {
    int64_t flat = 0;
    for (size_t a = 0; a < shape_.size(); ++a) flat = flat * shape_[a] + index[a];
    return flat;
}

bool Field::all_finite() const {
    for (double v : data_)
        if (!std::isfinite(v)) return false;
    return true;
}

double Field::l2_norm() const {
    double acc = 0.0;
    for (double v : data_) acc += v * v;
    return std::sqrt(acc);
}

double Field::max_abs() const {
    double acc = 0.0;
    for (double v : data_) acc = std::max(acc, std::abs(v));
    return acc;
}

double Field::mean() const {
    if (data_.empty()) return 0.0;
    double acc = std::accumulate(data_.begin(), data_.end(), 0.0);
    return acc / static_cast<double>(data_.size());
}

SpectralField::SpectralField(Shape stored_shape, int spatial_rank, int64_t last_logical_extent)
    : shape_(std::move(stored_shape)), spatial_rank_(spatial_rank), last_logical_(last_logical_extent) {
    validate_shape(shape_);
    FNO_REQUIRE(spatial_rank_ >= 1 && spatial_rank_ <= rank(), DataError,
                "spectral field spatial rank ", spatial_rank_, " out of range for shape ",
                shape_str(shape_));
    FNO_REQUIRE(shape_[static_cast<size_t>(spatial_rank_ - 1)] == last_logical_ / 2 + 1, DataError,
                "stored last spatial extent must be floor(s/2)+1 of the logical extent");
    data_.assign(static_cast<size_t>(shape_size(shape_)), {0.0, 0.0});
}

Shape SpectralField::logical_spatial() const {
    Shape s(shape_.begin(), shape_.begin() + spatial_rank_);
    s[static_cast<size_t>(spatial_rank_ - 1)] = last_logical_;
    return s;
}

int64_t SpectralField::logical_spatial_size() const { return shape_size(logical_spatial()); }

int64_t SpectralField::channel_size() const {
    int64_t n = 1;
    for (size_t a = static_cast<size_t>(spatial_rank_); a < shape_.size(); ++a) n *= shape_[a];
    return n;
}

int64_t SpectralField::stored_spatial_size() const {
    int64_t n = 1;
    for (int a = 0; a < spatial_rank_; ++a) n *= shape_[static_cast<size_t>(a)];
    return n;
}

int64_t SpectralField::flat_index(const Shape& index) const {
    int64_t flat = 0;
    for (size_t a = 0; a < shape_.size(); ++a) flat = flat * shape_[a] + index[a];
    return flat;
}

void check_finite(const Field& f, const char* context) {
    if (!f.all_finite())
        throw NumericError(concat(context, ": field of shape ", shape_str(f.shape()),
                                  " contains non-finite values"));
}

} // namespace fno
