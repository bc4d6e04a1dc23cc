#pragma once

#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "model.hpp"

namespace fadingld {

// key = value lines under [section] headers; '#' starts a comment.
class IniDocument {
public:
    static IniDocument parse(std::istream& in) {
        static const std::set<std::string> known{"window", "pathloss", "fading", "qos", "intensity", "base"};
        IniDocument doc;
        std::string line, section;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
            line = trim(line);
            if (line.empty()) continue;
            if (line.front() == '[') {
                if (line.back() != ']') throw ModelError("line " + std::to_string(lineno) + ": unterminated section");
                section = trim(line.substr(1, line.size() - 2));
                if (!known.count(section)) throw ModelError("unknown section [" + section + "]");
                doc.values_[section];
                continue;
            }
            auto eq = line.find('=');
            if (eq == std::string::npos) throw ModelError("line " + std::to_string(lineno) + ": expected key = value");
            if (section.empty()) throw ModelError("line " + std::to_string(lineno) + ": key outside a section");
            doc.values_[section][trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
        }
        return doc;
    }

    static IniDocument load(const std::string& path) {
        std::ifstream f(path);
        if (!f) throw ModelError("cannot open scenario file " + path);
        return parse(f);
    }

    bool has_section(const std::string& s) const { return values_.count(s) > 0; }
    bool has(const std::string& s, const std::string& k) const {
        auto it = values_.find(s);
        return it != values_.end() && it->second.count(k);
    }

    std::string str(const std::string& s, const std::string& k) const {
        if (!has(s, k)) throw ModelError("missing key " + s + "." + k);
        return values_.at(s).at(k);
    }
    std::string str(const std::string& s, const std::string& k, const std::string& fallback) const {
        return has(s, k) ? values_.at(s).at(k) : fallback;
    }
    double num(const std::string& s, const std::string& k) const { return to_number(str(s, k), s + "." + k); }
    double num(const std::string& s, const std::string& k, double fallback) const {
        return has(s, k) ? num(s, k) : fallback;
    }
    std::vector<double> list(const std::string& s, const std::string& k) const {
        return parse_list(str(s, k), s + "." + k);
    }

    static std::vector<double> parse_list(const std::string& text, const std::string& what = "list") {
        std::vector<double> out;
        std::stringstream ss(text);
        std::string item;
        while (std::getline(ss, item, ',')) out.push_back(to_number(trim(item), what));
        if (out.empty()) throw ModelError("empty list for " + what);
        return out;
    }

    // Canonical text used for hashing: sections and keys in sorted order.
    std::string canonical() const {
        std::string out;
        for (const auto& [s, kv] : values_) {
            out += "[" + s + "]\n";
            for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
        }
        return out;
    }

private:
    static std::string trim(const std::string& s) {
        auto a = s.find_first_not_of(" \t\r\n");
        if (a == std::string::npos) return "";
        auto b = s.find_last_not_of(" \t\r\n");
        return s.substr(a, b - a + 1);
    }
    static double to_number(const std::string& t, const std::string& what) {
        try {
            std::size_t used = 0;
            double v = std::stod(t, &used);
            if (used != t.size()) throw std::invalid_argument(t);
            return v;
        } catch (const std::exception&) {
            throw ModelError("not a number for " + what + ": '" + t + "'");
        }
    }

    std::map<std::string, std::map<std::string, std::string>> values_;
};

namespace detail {

inline FadingLaw read_law(const IniDocument& d, const std::string& s) {
    std::string form = d.str(s, "law", d.str(s, "form", "uniform"));
    if (form == "uniform") return FadingLaw::uniform(d.num(s, "min"), d.num(s, "max"));
    if (form == "atoms") return FadingLaw::atoms(d.list(s, "values"), d.list(s, "weights"));
    if (form == "density") return FadingLaw::density(d.list(s, "u"), d.list(s, "f"));
    throw ModelError("unknown fading law '" + form + "' in [" + s + "]");
}

}  // namespace detail

struct Scenario {
    NetworkModel model;
    std::string canonical_text;
};

inline Scenario scenario_from(const IniDocument& d) {
    std::string shape = d.str("window", "shape", "disk");
    Window w = shape == "disk"  ? Window::disk(d.num("window", "r"))
               : shape == "box" ? Window::box(static_cast<int>(d.num("window", "dim", 2)), d.num("window", "r"))
                                : throw ModelError("unknown window shape '" + shape + "'");

    std::string plf = d.str("pathloss", "form");
    PathLoss pl = plf == "truncated_power" ? PathLoss::truncated_power(d.num("pathloss", "cap"), d.num("pathloss", "exponent"))
                  : plf == "constant"      ? PathLoss::constant(d.num("pathloss", "value"))
                  : plf == "tabulated"     ? PathLoss::tabulated(d.list("pathloss", "s"), d.list("pathloss", "l"))
                                           : throw ModelError("unknown path-loss form '" + plf + "'");

    FadingLaw fading = detail::read_law(d, "fading");

    std::string qf = d.str("qos", "form", "identity");
    QosFunction g = qf == "identity"    ? QosFunction::truncated_identity(d.num("qos", "cap"))
                    : qf == "tabulated" ? QosFunction::tabulated(d.list("qos", "x"), d.list("qos", "g"))
                                        : throw ModelError("unknown qos form '" + qf + "'");

    std::string inf = d.str("intensity", "form", "uniform");
    SpatialIntensity mu = inf == "uniform" ? SpatialIntensity::uniform(d.num("intensity", "mass"))
                          : inf == "radial" ? SpatialIntensity::radial(d.list("intensity", "s"), d.list("intensity", "q"))
                                            : throw ModelError("unknown intensity form '" + inf + "'");

    BaseFading base = BaseFading::midpoint();
    if (d.has_section("base")) {
        std::string bf = d.str("base", "form", "midpoint");
        if (bf == "fixed")
            base = BaseFading::fixed(d.num("base", "value"));
        else if (bf == "random")
            base = BaseFading::random(detail::read_law(d, "base"));
        else if (bf != "midpoint")
            throw ModelError("unknown base fading form '" + bf + "'");
    }
    return {NetworkModel(w, pl, fading, g, mu, base), d.canonical()};
}

inline Scenario load_scenario(const std::string& path) { return scenario_from(IniDocument::load(path)); }

inline Scenario parse_scenario(const std::string& text) {
    std::istringstream in(text);
    return scenario_from(IniDocument::parse(in));
}

}  // namespace fadingld
