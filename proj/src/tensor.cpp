// Licensed under the Apache License, Version 2.0 (the "License"); you
// may not use this file except in compliance with the License.  You
// may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or
// implied.  See the License for the specific language governing
// permissions and limitations under the License.

#include "gamn/tensor.hpp"

#include "gamn/error.hpp"

#include <cmath>
#include <functional>
#include <numeric>

namespace gamn {

std::size_t shape_size(const Shape& shape)
{
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                           std::multiplies<>{});
}

std::string shape_string(const Shape& shape)
{
    std::string s = "(";
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i != 0) s += "x";
        s += std::to_string(shape[i]);
    }
    return s + ")";
}

ComplexTensor::ComplexTensor(Shape shape)
    : shape_(std::move(shape)), data_(shape_size(shape_))
{
}

ComplexTensor::ComplexTensor(Shape shape, std::vector<cplx> data)
    : shape_(std::move(shape)), data_(std::move(data))
{
    if (shape_size(shape_) != data_.size()) {
        throw ShapeError("tensor: shape " + shape_string(shape_) + " holds "
                         + std::to_string(shape_size(shape_)) + " values, got "
                         + std::to_string(data_.size()));
    }
}

ComplexTensor ComplexTensor::scalar(cplx value)
{
    return ComplexTensor({}, {value});
}

ComplexTensor ComplexTensor::vector(std::vector<cplx> values)
{
    Shape s{values.size()};
    return ComplexTensor(std::move(s), std::move(values));
}

ComplexTensor ComplexTensor::matrix(std::size_t rows, std::size_t cols)
{
    return ComplexTensor(Shape{rows, cols});
}

std::size_t ComplexTensor::rows() const noexcept
{
    if (shape_.empty()) return 1;
    return shape_[0];
}

std::size_t ComplexTensor::cols() const noexcept
{
    if (shape_.size() < 2) return 1;
    return shape_[1];
}

cplx ComplexTensor::item() const
{
    if (data_.size() != 1) {
        throw ShapeError("item: expected a single value, shape is " + shape_string(shape_));
    }
    return data_[0];
}

bool ComplexTensor::all_finite() const noexcept
{
    for (const auto& z : data_) {
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    }
    return true;
}

double squared_norm(const ComplexTensor& t) noexcept
{
    double s = 0.0;
    for (const auto& z : t.data()) s += std::norm(z);
    return s;
}

double real_inner(const ComplexTensor& a, const ComplexTensor& b)
{
    if (a.size() != b.size()) {
        throw ShapeError("real_inner: " + shape_string(a.shape()) + " vs "
                         + shape_string(b.shape()));
    }
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
    }
    return s;
}

} // namespace gamn
