/*
 Copyright 2026 The grushin-mfg Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#ifndef GRUSHIN_CORE_HPP
#define GRUSHIN_CORE_HPP

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace grushin
{

/// Default absolute tolerance for "y(.) in Sigma" checks, in length units.
inline constexpr double kDefaultTolMember = 1e-9;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// A point of the plane (state space).
struct Point
{
    double x1 = 0.0;
    double x2 = 0.0;

    friend constexpr Point operator+(Point a, Point b) { return {a.x1 + b.x1, a.x2 + b.x2}; }
    friend constexpr Point operator-(Point a, Point b) { return {a.x1 - b.x1, a.x2 - b.x2}; }
    friend constexpr Point operator*(double s, Point a) { return {s * a.x1, s * a.x2}; }
    friend constexpr bool operator==(Point a, Point b) = default;

    double norm() const { return std::hypot(x1, x2); }
};

inline double distance(Point a, Point b) { return (a - b).norm(); }

/// Value of a piecewise-constant control on one piece. a1 is in length/time,
/// a2 in length^(1-nu)/time.
struct ControlValue
{
    double a1 = 0.0;
    double a2 = 0.0;

    friend constexpr bool operator==(ControlValue a, ControlValue b) = default;
    double squared_norm() const { return a1 * a1 + a2 * a2; }
};

/// Malformed parameters, inconsistent witnesses, bad config values.
class ConfigError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

/// An operation called outside its domain (point outside the set, bad horizon, ...).
class DomainError : public std::domain_error
{
public:
    using std::domain_error::domain_error;
};

/// No construction is available for the requested configuration.
class UnsupportedError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Broken internal invariant; should not happen.
class InternalError : public std::logic_error
{
public:
    using std::logic_error::logic_error;
};

inline double sign(double z) { return z > 0.0 ? 1.0 : (z < 0.0 ? -1.0 : 0.0); }

} // namespace grushin

#endif // GRUSHIN_CORE_HPP
