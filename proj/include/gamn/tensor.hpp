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

#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace gamn {

using cplx = std::complex<double>;
using Shape = std::vector<std::size_t>;

std::size_t shape_size(const Shape& shape);
std::string shape_string(const Shape& shape);

/// Dense complex array in row-major order. Rank 0 is a scalar, rank 1 a
/// vector, rank 2 a matrix; nothing in this project needs more.
class ComplexTensor {
public:
    ComplexTensor() : shape_{}, data_(1) {}
    explicit ComplexTensor(Shape shape);
    ComplexTensor(Shape shape, std::vector<cplx> data);

    static ComplexTensor scalar(cplx value);
    static ComplexTensor vector(std::vector<cplx> values);
    static ComplexTensor matrix(std::size_t rows, std::size_t cols);

    const Shape& shape() const noexcept { return shape_; }
    std::size_t size() const noexcept { return data_.size(); }
    std::size_t rank() const noexcept { return shape_.size(); }

    // Rank-2 extents; a rank-1 tensor reads as a column.
    std::size_t rows() const noexcept;
    std::size_t cols() const noexcept;

    std::span<cplx> data() noexcept { return data_; }
    std::span<const cplx> data() const noexcept { return data_; }

    cplx& operator[](std::size_t i) noexcept { return data_[i]; }
    const cplx& operator[](std::size_t i) const noexcept { return data_[i]; }

    cplx& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols() + c]; }
    const cplx& operator()(std::size_t r, std::size_t c) const noexcept
    {
        return data_[r * cols() + c];
    }

    cplx item() const;

    bool all_finite() const noexcept;
    bool operator==(const ComplexTensor& other) const = default;

private:
    Shape shape_;
    std::vector<cplx> data_;
};

// Squared Frobenius norm.
double squared_norm(const ComplexTensor& t) noexcept;
// Re(sum conj(a) b): the real inner product of the underlying real vectors.
double real_inner(const ComplexTensor& a, const ComplexTensor& b);

} // namespace gamn
