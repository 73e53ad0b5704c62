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

#ifndef GRUSHIN_CONFIG_HPP
#define GRUSHIN_CONFIG_HPP

#include "grushin/mfg.hpp"
#include "grushin/ocp.hpp"
#include "grushin/reachability.hpp"

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace grushin
{

using json = nlohmann::json;

/// Knobs of the reachability probes.
struct ReachConfig
{
    Point target;
    std::optional<Point> source;
    /// Sources for sequences: explicit list, or target + (d1 2^{-k p1}, d2 2^{-k p2}), k = 1..k_max.
    std::vector<Point> sources;
    int k_max = 10;
    Point approach_dir{1.0, 1.0};
    Point approach_pow{1.0, 1.0};
    double delta_thr = 1e-2;
    double l2_thr = 1e-2;
    int n_pairs = 50;
    double pair_radius = 0.25;
    std::vector<double> eps;
    int n_trials = 100;
    double hyp_step = 1e-3;
    ConnectOptions connect;
};

struct MfgConfig
{
    FictitiousPlayOptions fp;
    AtomicMeasure m0;
};

/// Fully validated run configuration. `raw` keeps the merged JSON it was
/// built from.
struct RunConfig
{
    json raw;
    std::string preset;
    std::optional<ConstraintSet> set;
    double nu = 1.0;
    double T = 1.0;
    double t0 = 0.0;
    Point x0;
    std::uint64_t seed = 0;
    std::filesystem::path out_dir;
    CostSpec cost;
    CouplingSpec coupling;
    OcpDisc disc;
    GridSpec grid;
    MfgConfig mfg;
    ReachConfig reach;

    const ConstraintSet &sigma() const { return *set; }
};

namespace config
{

/// Output directory used when neither the config nor a flag sets one.
inline std::string default_out_dir()
{
    const char *e = std::getenv("GRUSHIN_OUT");
    return e && *e ? std::string(e) : std::string("out");
}

/// Every accepted key with its default. Keys whose default is null take a
/// shape-dependent value (set, curve or field descriptors, point lists) that
/// is checked when the objects are built.
inline json defaults()
{
    return json::parse(R"({
      "nu": 1.0,
      "T": 1.0,
      "t0": 0.0,
      "x0": [0.5, 0.5],
      "seed": 0,
      "out_dir": null,
      "set": null,
      "cost": {"ell": null, "g": null, "K": 1.0},
      "coupling": {"kind": "kernel_congestion", "strength": 1.0, "terminal_strength": 1.0, "bandwidth": 0.2},
      "m0": null,
      "disc": {"n_steps": 32, "n_restarts": 4, "penalty_weight": 10.0, "max_iters": 200,
               "fd_step": 1e-6, "residual_tol": 1e-5},
      "grid": {"nx1": 64, "nx2": 64, "nt": 128, "n_r": 8, "n_theta": 16, "cap_cells": 8.0, "box": null},
      "mfg": {"iters": 200, "n_steps": 16, "n_restarts": 1, "max_iters": 100, "w1_stride": 1,
              "prune_tol": 1e-10, "final_round": true},
      "reach": {"target": [0.0, 0.0], "source": null, "sources": null, "k_max": 10,
                "approach_dir": [1.0, 1.0], "approach_pow": [1.0, 1.0],
                "delta_thr": 1e-2, "l2_thr": 1e-2, "n_pairs": 50, "pair_radius": 0.25,
                "eps": [1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6], "n_trials": 100, "hyp_step": 1e-3,
                "extended": false, "curve_tol": 1e-11, "max_pieces": 65536}
    })");
}

/// Named configurations for the worked examples. Free parameters the
/// examples leave open (witness C and R, cone slopes, costs, T, grid boxes)
/// are fixed here.
inline const std::map<std::string, json> &presets()
{
    static const std::map<std::string, json> p = [] {
        std::map<std::string, json> m;
        // -min(x1, 10)
        const json decreasing = {{"type", "affine"}, {"coef", {0.0, -1.0, 0.0}}, {"min", -10.0}};
        m["rectangle-ex51"] = json::parse(R"({
          "set": {"type": "rectangle", "a1": 0.0, "b1": 1.0, "a2": 0.0, "b2": 1.0,
                  "witnesses": [{"x0": [1.0, 0.5], "R": 0.5, "family": "segment_vertical", "side": 1},
                                {"x0": [1.0, 0.5], "R": 0.5, "family": "segment_vertical", "side": -1}]},
          "cost": {"ell": 0.0, "g": {"type": "quadratic", "center": [0.8, 0.8], "weight": 0.5}, "K": 1.0},
          "x0": [0.2, 0.3],
          "reach": {"target": [0.5, 0.5], "approach_dir": [1.0, 0.0], "approach_pow": [1.0, 1.0]}
        })");
        m["sublevel-ex52"] = json::parse(R"({
          "set": {"type": "sublevel", "f": {"constant": 0.0, "terms": [{"coef": 1.0, "power": 2.0}]},
                  "lo": -1.0, "hi": 1.0,
                  "witnesses": [{"x0": [0.0, 0.0], "C": 1.0, "R": 1.0, "family": "power_curve_pos"},
                                {"x0": [0.0, 0.0], "C": 1.0, "R": 1.0, "family": "power_curve_neg"}]},
          "cost": {"ell": 0.0, "g": {"type": "quadratic", "center": [0.0, 1.0], "weight": 0.5}, "K": 1.0},
          "grid": {"box": [-1.0, 1.0, 0.0, 2.0]},
          "x0": [0.5, 1.0],
          "reach": {"target": [0.0, 0.0], "approach_dir": [1.0, 1.0], "approach_pow": [1.0, 2.0]}
        })");
        m["band-ex53"] = json::parse(R"({
          "set": {"type": "band", "lower": {"constant": 0.0, "terms": [{"coef": 1.0, "power": 2.0}]},
                  "upper": 1.0, "lo": 0.0, "hi": 1.0,
                  "witnesses": [{"x0": [0.0, 0.0], "C": 1.0, "R": 1.0, "family": "power_curve_pos"}]},
          "cost": {"ell": {"type": "affine", "coef": [0.0, -1.0, 0.0]}, "g": 0.0, "K": 1.0},
          "x0": [0.5, 0.5],
          "m0": [[0.1, 0.505, 0.125], [0.2, 0.52, 0.125], [0.3, 0.545, 0.125], [0.4, 0.58, 0.125],
                 [0.5, 0.625, 0.125], [0.6, 0.68, 0.125], [0.7, 0.745, 0.125], [0.8, 0.82, 0.125]],
          "reach": {"target": [0.0, 0.0], "approach_dir": [1.0, 1.0], "approach_pow": [1.0, 2.0]}
        })");
        m["cone-ex54"] = json::parse(R"({
          "set": {"type": "cone", "m1": 1.0, "m2": 2.0},
          "cost": {"g": 0.0, "K": 10.0},
          "grid": {"box": [0.0, 2.0, 0.0, 4.0]},
          "x0": [1.0, 1.5],
          "reach": {"target": [0.0, 0.0], "approach_dir": [1.0, 1.5], "approach_pow": [1.0, 1.0]}
        })");
        m["cone-ex54"]["cost"]["ell"] = decreasing;
        m["curve-ex55"] = json::parse(R"({
          "set": {"type": "curve", "gamma": {"constant": 0.0, "terms": [{"coef": 1.0, "power": 2.0}]}, "R": 1.0},
          "cost": {"ell": 0.0, "g": {"type": "quadratic", "center": [0.0, 0.0], "weight": 0.5}, "K": 1.0},
          "grid": {"box": [0.0, 1.0, 0.0, 1.0]},
          "x0": [0.5, 0.25],
          "reach": {"target": [0.0, 0.0], "approach_dir": [1.0, 1.0], "approach_pow": [1.0, 2.0]}
        })");
        m["cone-halfplane-ex56"] = json::parse(R"({
          "set": {"type": "union", "parts": [
                    {"type": "cone", "m1": 1.0, "m2": 2.0},
                    {"type": "rectangle", "a1": "-inf", "b1": "inf", "a2": "-inf", "b2": 0.0}]},
          "T": 5.0,
          "cost": {"g": 0.0, "K": 10.0},
          "grid": {"box": [-4.0, 12.0, -8.0, 24.0]},
          "x0": [1.0, 1.5],
          "reach": {"target": [0.0, 0.0], "approach_dir": [1.0, 1.5], "approach_pow": [1.0, 1.0]}
        })");
        m["cone-halfplane-ex56"]["cost"]["ell"] = decreasing;
        return m;
    }();
    return p;
}

inline std::vector<std::string> preset_names()
{
    std::vector<std::string> n;
    for (const auto &[k, v] : presets())
        n.push_back(k);
    return n;
}

inline const json &preset(const std::string &name)
{
    auto it = presets().find(name);
    if (it == presets().end())
        throw ConfigError("preset: unknown name '" + name + "'");
    return it->second;
}

namespace detail
{

inline std::string type_name(const json &j)
{
    if (j.is_null())
        return "null";
    if (j.is_boolean())
        return "boolean";
    if (j.is_number_integer())
        return "integer";
    if (j.is_number())
        return "number";
    if (j.is_string())
        return "string";
    if (j.is_array())
        return "array";
    return "object";
}

/// Checks `j` against the shape of `ref`: no keys outside it, same JSON kind,
/// integers where the default is an integer. Null defaults accept anything.
inline void check_against(const json &j, const json &ref, const std::string &path)
{
    if (ref.is_null())
        return;
    const std::string where = path.empty() ? "<root>" : path;
    if (ref.is_object())
    {
        if (!j.is_object())
            throw ConfigError("config: '" + where + "' must be an object, got " + type_name(j));
        for (const auto &[k, v] : j.items())
        {
            const std::string sub = path.empty() ? k : path + "." + k;
            if (!ref.contains(k))
                throw ConfigError("config: unknown key '" + sub + "'");
            check_against(v, ref.at(k), sub);
        }
        return;
    }
    const bool ok = (ref.is_boolean() && j.is_boolean()) || (ref.is_string() && j.is_string()) ||
                    (ref.is_array() && j.is_array()) || (ref.is_number_integer() && j.is_number_integer()) ||
                    (ref.is_number_float() && j.is_number());
    if (!ok)
        throw ConfigError("config: '" + where + "' must be " + type_name(ref) + ", got " + type_name(j));
}

/// Every key of `ref` is present in `j` (layers may delete keys with null).
inline void check_complete(const json &j, const json &ref, const std::string &path)
{
    for (const auto &[k, v] : ref.items())
    {
        const std::string sub = path.empty() ? k : path + "." + k;
        if (!j.contains(k))
            throw ConfigError("config: missing key '" + sub + "'");
        if (v.is_object())
            check_complete(j.at(k), v, sub);
    }
}

/// Layers `patch` onto `base`. Values that describe a whole object (set,
/// cost fields, point lists) replace instead of merging.
inline void layer(json &base, const json &patch)
{
    if (!patch.is_object())
        throw ConfigError("config: a config layer must be a JSON object");
    for (const char *k : {"set", "m0"})
        if (patch.contains(k))
            base.erase(k);
    if (patch.contains("cost") && patch["cost"].is_object() && base.contains("cost"))
        for (const char *k : {"ell", "g"})
            if (patch["cost"].contains(k))
                base["cost"].erase(k);
    base.merge_patch(patch);
}

inline double number(const json &j, const std::string &path)
{
    if (j.is_number())
        return j.get<double>();
    if (j.is_string())
    {
        const auto s = j.get<std::string>();
        if (s == "inf")
            return kInf;
        if (s == "-inf")
            return -kInf;
    }
    throw ConfigError("config: '" + path + "' must be a number (or \"inf\"/\"-inf\"), got " + type_name(j));
}

inline const json &required(const json &j, const char *key, const std::string &path)
{
    if (!j.contains(key))
        throw ConfigError("config: missing key '" + path + "." + key + "'");
    return j.at(key);
}

inline void allow_only(const json &j, std::initializer_list<const char *> keys, const std::string &path)
{
    if (!j.is_object())
        throw ConfigError("config: '" + path + "' must be an object, got " + type_name(j));
    for (const auto &[k, v] : j.items())
    {
        bool ok = false;
        for (const char *a : keys)
            ok = ok || k == a;
        if (!ok)
            throw ConfigError("config: unknown key '" + path + "." + k + "'");
    }
}

inline Point point(const json &j, const std::string &path)
{
    if (!j.is_array() || j.size() != 2)
        throw ConfigError("config: '" + path + "' must be a pair [x1, x2]");
    return {number(j[0], path + "[0]"), number(j[1], path + "[1]")};
}

inline std::vector<Point> points(const json &j, const std::string &path)
{
    if (!j.is_array())
        throw ConfigError("config: '" + path + "' must be a list of [x1, x2] pairs");
    std::vector<Point> v;
    for (std::size_t i = 0; i < j.size(); ++i)
        v.push_back(point(j[i], path + "[" + std::to_string(i) + "]"));
    return v;
}

/// A number, or {constant, terms: [{coef, power, odd}]}.
inline ScalarCurve curve(const json &j, const std::string &path)
{
    if (j.is_number())
        return ScalarCurve::constant_value(j.get<double>());
    allow_only(j, {"constant", "terms"}, path);
    ScalarCurve c;
    if (j.contains("constant"))
        c.constant = number(j["constant"], path + ".constant");
    if (j.contains("terms"))
    {
        const json &t = j["terms"];
        if (!t.is_array())
            throw ConfigError("config: '" + path + ".terms' must be a list");
        for (std::size_t i = 0; i < t.size(); ++i)
        {
            const std::string p = path + ".terms[" + std::to_string(i) + "]";
            allow_only(t[i], {"coef", "power", "odd"}, p);
            PowerTerm pt;
            pt.coef = number(required(t[i], "coef", p), p + ".coef");
            pt.power = number(required(t[i], "power", p), p + ".power");
            if (t[i].contains("odd"))
            {
                if (!t[i]["odd"].is_boolean())
                    throw ConfigError("config: '" + p + ".odd' must be boolean");
                pt.odd = t[i]["odd"].get<bool>();
            }
            if (!(pt.power >= 0.0))
                throw ConfigError("config: '" + p + ".power' must be >= 0");
            c.terms.push_back(pt);
        }
    }
    return c;
}

inline CurveFamily family(const json &j, const std::string &path)
{
    if (!j.is_string())
        throw ConfigError("config: '" + path + "' must be a string");
    const auto s = j.get<std::string>();
    for (auto f : {CurveFamily::segment_vertical, CurveFamily::segment_slope_pos, CurveFamily::segment_slope_neg,
                   CurveFamily::power_curve_pos, CurveFamily::power_curve_neg})
        if (to_string(f) == s)
            return f;
    throw ConfigError("config: '" + path + "' names no curve family: '" + s + "'");
}

inline Witness witness(const json &j, const std::string &path)
{
    allow_only(j, {"x0", "C", "R", "family", "side", "rho"}, path);
    Witness w;
    w.x0 = point(required(j, "x0", path), path + ".x0");
    w.family = family(required(j, "family", path), path + ".family");
    if (j.contains("C"))
        w.C = number(j["C"], path + ".C");
    if (j.contains("R"))
        w.R = number(j["R"], path + ".R");
    if (j.contains("side"))
    {
        if (!j["side"].is_number_integer())
            throw ConfigError("config: '" + path + ".side' must be +1 or -1");
        w.side = j["side"].get<int>();
    }
    if (j.contains("rho"))
        w.rho = number(j["rho"], path + ".rho");
    return w;
}

inline ConstraintSet set(const json &j, const std::string &path)
{
    if (!j.is_object())
        throw ConfigError("config: '" + path + "' must be an object with a 'type'");
    const json &tj = required(j, "type", path);
    if (!tj.is_string())
        throw ConfigError("config: '" + path + ".type' must be a string");
    const auto type = tj.get<std::string>();
    auto num = [&](const char *k) { return number(required(j, k, path), path + "." + k); };
    std::optional<ConstraintSet> s;
    if (type == "rectangle")
    {
        allow_only(j, {"type", "a1", "b1", "a2", "b2", "shift", "tol_member", "witnesses"}, path);
        s = ConstraintSet::rectangle(num("a1"), num("b1"), num("a2"), num("b2"));
    }
    else if (type == "sublevel")
    {
        allow_only(j, {"type", "f", "lo", "hi", "shift", "tol_member", "witnesses"}, path);
        const double lo = j.contains("lo") ? num("lo") : -kInf, hi = j.contains("hi") ? num("hi") : kInf;
        s = ConstraintSet::sublevel(curve(required(j, "f", path), path + ".f"), lo, hi);
    }
    else if (type == "band")
    {
        allow_only(j, {"type", "lower", "upper", "lo", "hi", "shift", "tol_member", "witnesses"}, path);
        s = ConstraintSet::band(curve(required(j, "lower", path), path + ".lower"),
                                curve(required(j, "upper", path), path + ".upper"), num("lo"), num("hi"));
    }
    else if (type == "cone")
    {
        allow_only(j, {"type", "m1", "m2", "shift", "tol_member", "witnesses"}, path);
        s = ConstraintSet::cone(num("m1"), num("m2"));
    }
    else if (type == "curve")
    {
        allow_only(j, {"type", "gamma", "R", "shift", "tol_member", "witnesses"}, path);
        s = ConstraintSet::curve(curve(required(j, "gamma", path), path + ".gamma"), num("R"));
    }
    else if (type == "union")
    {
        allow_only(j, {"type", "parts", "shift", "tol_member", "witnesses"}, path);
        const json &p = required(j, "parts", path);
        if (!p.is_array())
            throw ConfigError("config: '" + path + ".parts' must be a list of sets");
        std::vector<ConstraintSet> parts;
        for (std::size_t i = 0; i < p.size(); ++i)
            parts.push_back(set(p[i], path + ".parts[" + std::to_string(i) + "]"));
        s = ConstraintSet::union_of(std::move(parts));
    }
    else
        throw ConfigError("config: '" + path + ".type' names no set type: '" + type + "'");

    if (j.contains("shift"))
        s = s->shifted(point(j["shift"], path + ".shift"));
    if (j.contains("tol_member"))
        s = s->with_tolerance(number(j["tol_member"], path + ".tol_member"));
    if (j.contains("witnesses"))
    {
        const json &w = j["witnesses"];
        if (!w.is_array())
            throw ConfigError("config: '" + path + ".witnesses' must be a list");
        for (std::size_t i = 0; i < w.size(); ++i)
            s = s->with_witness(witness(w[i], path + ".witnesses[" + std::to_string(i) + "]"));
    }
    return *s;
}

/// Running cost descriptor: null (zero), a number (constant), or
/// {type: constant, value}, {type: affine, coef: [c0, c1, c2], t, min, max}
/// giving c0 + c1 x1 + c2 x2 + t * time, or
/// {type: quadratic, center, weight, value, min, max} giving value + weight |x - center|^2.
/// min and max clamp the result.
inline std::function<double(Point, double)> field(const json &j, const std::string &path)
{
    if (j.is_null())
        return [](Point, double) { return 0.0; };
    if (j.is_number())
    {
        const double c = j.get<double>();
        return [c](Point, double) { return c; };
    }
    if (!j.is_object())
        throw ConfigError("config: '" + path + "' must be a number or a field object");
    const json &tj = required(j, "type", path);
    if (!tj.is_string())
        throw ConfigError("config: '" + path + ".type' must be a string");
    const auto type = tj.get<std::string>();
    const double lo = j.contains("min") ? number(j["min"], path + ".min") : -kInf;
    const double hi = j.contains("max") ? number(j["max"], path + ".max") : kInf;
    if (!(lo <= hi))
        throw ConfigError("config: '" + path + "' needs min <= max");
    if (type == "constant")
    {
        allow_only(j, {"type", "value", "min", "max"}, path);
        const double c = std::clamp(number(required(j, "value", path), path + ".value"), lo, hi);
        return [c](Point, double) { return c; };
    }
    if (type == "affine")
    {
        allow_only(j, {"type", "coef", "t", "min", "max"}, path);
        const json &c = required(j, "coef", path);
        if (!c.is_array() || c.size() != 3)
            throw ConfigError("config: '" + path + ".coef' must be [c0, c1, c2]");
        const double c0 = number(c[0], path + ".coef[0]"), c1 = number(c[1], path + ".coef[1]"),
                     c2 = number(c[2], path + ".coef[2]");
        const double ct = j.contains("t") ? number(j["t"], path + ".t") : 0.0;
        return [=](Point x, double t) { return std::clamp(c0 + c1 * x.x1 + c2 * x.x2 + ct * t, lo, hi); };
    }
    if (type == "quadratic")
    {
        allow_only(j, {"type", "center", "weight", "value", "min", "max"}, path);
        const Point z = point(required(j, "center", path), path + ".center");
        const double w = j.contains("weight") ? number(j["weight"], path + ".weight") : 1.0;
        const double v = j.contains("value") ? number(j["value"], path + ".value") : 0.0;
        return [=](Point x, double) {
            const Point d = x - z;
            return std::clamp(v + w * (d.x1 * d.x1 + d.x2 * d.x2), lo, hi);
        };
    }
    throw ConfigError("config: '" + path + ".type' names no field type: '" + type + "'");
}

inline AtomicMeasure measure(const json &j, const std::string &path)
{
    if (!j.is_array() || j.empty())
        throw ConfigError("config: '" + path + "' must be a non-empty list of [x1, x2, w]");
    AtomicMeasure m;
    for (std::size_t i = 0; i < j.size(); ++i)
    {
        const std::string p = path + "[" + std::to_string(i) + "]";
        if (!j[i].is_array() || j[i].size() != 3)
            throw ConfigError("config: '" + p + "' must be [x1, x2, w]");
        m.push({number(j[i][0], p), number(j[i][1], p)}, number(j[i][2], p));
    }
    m.validate();
    if (!m.normalized(1e-12))
        throw ConfigError("config: '" + path + "' weights must add up to 1");
    return m;
}

template <typename T> T get(const json &j, const char *key) { return j.at(key).get<T>(); }

inline int positive_int(const json &j, const char *key, const std::string &path)
{
    const int v = j.at(key).get<int>();
    if (v < 1)
        throw ConfigError("config: '" + path + "." + key + "' must be >= 1");
    return v;
}

} // namespace detail

/// Flag-level overrides applied after the file.
struct Overrides
{
    std::optional<std::string> preset;
    std::optional<std::filesystem::path> file;
    json patch = json::object();
};

/// Builds the RunConfig from already merged JSON.
inline RunConfig build(const json &merged, const std::string &preset_name = "")
{
    using namespace detail;
    check_against(merged, defaults(), "");
    check_complete(merged, defaults(), "");
    RunConfig rc;
    rc.raw = merged;
    rc.preset = preset_name;

    if (merged["set"].is_null())
        throw ConfigError("config: missing key 'set' (give a set, a preset or a config file)");
    rc.set = set(merged["set"], "set");
    rc.nu = get<double>(merged, "nu");
    check_nu(rc.nu);
    rc.T = get<double>(merged, "T");
    if (!(rc.T > 0.0))
        throw ConfigError("config: 'T' must be > 0");
    rc.t0 = get<double>(merged, "t0");
    if (!(rc.t0 >= 0.0 && rc.t0 < rc.T))
        throw ConfigError("config: 't0' must lie in [0, T)");
    rc.x0 = point(merged["x0"], "x0");
    if (merged["seed"].is_number_integer() && merged["seed"].get<long long>() < 0)
        throw ConfigError("config: 'seed' must be >= 0");
    rc.seed = merged["seed"].get<std::uint64_t>();
    if (merged["out_dir"].is_null())
        rc.out_dir = default_out_dir();
    else if (merged["out_dir"].is_string())
        rc.out_dir = merged["out_dir"].get<std::string>();
    else
        throw ConfigError("config: 'out_dir' must be a string");

    const json &c = merged["cost"];
    rc.cost.T = rc.T;
    rc.cost.bound_K = get<double>(c, "K");
    if (!(rc.cost.bound_K > 0.0))
        throw ConfigError("config: 'cost.K' must be > 0");
    rc.cost.ell = field(c["ell"], "cost.ell");
    auto g = field(c["g"], "cost.g");
    rc.cost.g = [g](Point x) { return g(x, 0.0); };

    const json &cp = merged["coupling"];
    const auto kind = get<std::string>(cp, "kind");
    if (kind == "kernel_congestion")
        rc.coupling.kind = CouplingKind::kernel_congestion;
    else if (kind == "mean_attraction")
        rc.coupling.kind = CouplingKind::mean_attraction;
    else
        throw ConfigError("config: 'coupling.kind' must be kernel_congestion or mean_attraction");
    rc.coupling.ell0 = rc.cost.ell;
    rc.coupling.g0 = rc.cost.g;
    rc.coupling.strength = get<double>(cp, "strength");
    rc.coupling.terminal_strength = get<double>(cp, "terminal_strength");
    rc.coupling.bandwidth = get<double>(cp, "bandwidth");
    rc.coupling.bound_K = rc.cost.bound_K;
    rc.coupling.T = rc.T;
    rc.coupling.validate();

    const json &d = merged["disc"];
    rc.disc.n_steps = positive_int(d, "n_steps", "disc");
    rc.disc.n_restarts = positive_int(d, "n_restarts", "disc");
    rc.disc.penalty_weight = get<double>(d, "penalty_weight");
    rc.disc.max_iters = positive_int(d, "max_iters", "disc");
    rc.disc.fd_step = get<double>(d, "fd_step");
    rc.disc.residual_tol = get<double>(d, "residual_tol");
    rc.disc.seed = rc.seed;
    if (!(rc.disc.fd_step > 0.0) || !(rc.disc.penalty_weight >= 0.0))
        throw ConfigError("config: 'disc.fd_step' must be > 0 and 'disc.penalty_weight' >= 0");

    const json &gr = merged["grid"];
    rc.grid.nx1 = positive_int(gr, "nx1", "grid");
    rc.grid.nx2 = positive_int(gr, "nx2", "grid");
    rc.grid.nt = positive_int(gr, "nt", "grid");
    rc.grid.n_r = positive_int(gr, "n_r", "grid");
    rc.grid.n_theta = positive_int(gr, "n_theta", "grid");
    rc.grid.cap_cells = get<double>(gr, "cap_cells");
    if (!gr["box"].is_null())
    {
        const json &b = gr["box"];
        if (!b.is_array() || b.size() != 4)
            throw ConfigError("config: 'grid.box' must be [x1_lo, x1_hi, x2_lo, x2_hi]");
        rc.grid.box = Box{number(b[0], "grid.box[0]"), number(b[1], "grid.box[1]"), number(b[2], "grid.box[2]"),
                          number(b[3], "grid.box[3]")};
    }

    const json &mf = merged["mfg"];
    rc.mfg.fp.n_iters = get<int>(mf, "iters");
    if (rc.mfg.fp.n_iters < 0)
        throw ConfigError("config: 'mfg.iters' must be >= 0");
    rc.mfg.fp.disc = rc.disc;
    rc.mfg.fp.disc.n_steps = positive_int(mf, "n_steps", "mfg");
    rc.mfg.fp.disc.n_restarts = positive_int(mf, "n_restarts", "mfg");
    rc.mfg.fp.disc.max_iters = positive_int(mf, "max_iters", "mfg");
    rc.mfg.fp.w1_stride = positive_int(mf, "w1_stride", "mfg");
    rc.mfg.fp.prune_tol = get<double>(mf, "prune_tol");
    rc.mfg.fp.final_round = get<bool>(mf, "final_round");
    if (!merged["m0"].is_null())
        rc.mfg.m0 = measure(merged["m0"], "m0");

    const json &r = merged["reach"];
    auto &rr = rc.reach;
    rr.target = point(r["target"], "reach.target");
    if (!r["source"].is_null())
        rr.source = point(r["source"], "reach.source");
    rr.k_max = positive_int(r, "k_max", "reach");
    rr.approach_dir = point(r["approach_dir"], "reach.approach_dir");
    rr.approach_pow = point(r["approach_pow"], "reach.approach_pow");
    if (!r["sources"].is_null())
        rr.sources = points(r["sources"], "reach.sources");
    else
        for (int k = 1; k <= rr.k_max; ++k)
            rr.sources.push_back(rr.target + Point{rr.approach_dir.x1 * std::exp2(-k * rr.approach_pow.x1),
                                                   rr.approach_dir.x2 * std::exp2(-k * rr.approach_pow.x2)});
    rr.delta_thr = get<double>(r, "delta_thr");
    rr.l2_thr = get<double>(r, "l2_thr");
    rr.n_pairs = positive_int(r, "n_pairs", "reach");
    rr.pair_radius = get<double>(r, "pair_radius");
    for (std::size_t i = 0; i < r["eps"].size(); ++i)
    {
        const double e = number(r["eps"][i], "reach.eps[" + std::to_string(i) + "]");
        if (!(e > 0.0))
            throw ConfigError("config: 'reach.eps' entries must be > 0");
        rr.eps.push_back(e);
    }
    rr.n_trials = positive_int(r, "n_trials", "reach");
    rr.hyp_step = get<double>(r, "hyp_step");
    if (!(rr.hyp_step > 0.0))
        throw ConfigError("config: 'reach.hyp_step' must be > 0");
    rr.connect.extended = get<bool>(r, "extended");
    rr.connect.curve_tol = get<double>(r, "curve_tol");
    rr.connect.max_pieces = positive_int(r, "max_pieces", "reach");
    return rc;
}

inline json read_json_file(const std::filesystem::path &p)
{
    std::ifstream f(p);
    if (!f)
        throw ConfigError("config: cannot read '" + p.string() + "'");
    try
    {
        return json::parse(f);
    }
    catch (const json::parse_error &e)
    {
        throw ConfigError("config: '" + p.string() + "' is not valid JSON: " + e.what());
    }
}

/// defaults <- preset <- file <- flag patch. A preset named inside the file
/// is not supported; presets are chosen on the command line.
inline RunConfig parse_config(const Overrides &o)
{
    json merged = defaults();
    std::string name;
    if (o.preset)
    {
        name = *o.preset;
        detail::layer(merged, preset(name));
    }
    if (o.file)
    {
        const json f = read_json_file(*o.file);
        detail::check_against(f, defaults(), "");
        detail::layer(merged, f);
    }
    detail::check_against(o.patch, defaults(), "");
    detail::layer(merged, o.patch);
    try
    {
        return build(merged, name);
    }
    catch (const json::exception &e)
    {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

} // namespace config
} // namespace grushin

#endif // GRUSHIN_CONFIG_HPP
