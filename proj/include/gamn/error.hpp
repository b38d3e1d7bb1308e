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

#include <cstdint>
#include <stdexcept>
#include <string>

namespace gamn {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Operand shapes violate an op's shape rule.
class ShapeError : public Error {
public:
    using Error::Error;
};

// Input outside an op's mathematical domain (log2 of non-positive, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

// backward() called on a loss that is not a real scalar.
class NonRealLossError : public Error {
public:
    using Error::Error;
};

// x + v vanished during a retraction.
class DegenerateRetractionError : public Error {
public:
    using Error::Error;
};

// A point was handed to a manifold operation while off the manifold.
class OffManifoldError : public Error {
public:
    using Error::Error;
};

// Bad configuration value; key() names the offending entry.
class ConfigError : public Error {
public:
    ConfigError(std::string key, const std::string& message)
        : Error(key + ": " + message), key_(std::move(key))
    {
    }

    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

// A run failed mid-flight (non-finite loss etc.).
class RunError : public Error {
public:
    RunError(const std::string& message, std::uint64_t seed, int epoch)
        : Error(message + " (seed " + std::to_string(seed) + ", epoch "
                + std::to_string(epoch) + ")"),
          seed_(seed), epoch_(epoch)
    {
    }

    std::uint64_t seed() const noexcept { return seed_; }
    int epoch() const noexcept { return epoch_; }

private:
    std::uint64_t seed_;
    int epoch_;
};

class IoError : public Error {
public:
    using Error::Error;
};

} // namespace gamn
