#include "cspace/service/formula.hpp"

#include <algorithm>
#include <cctype>
#include <map>

namespace cspace {

std::optional<std::vector<std::pair<std::string, double>>> parse_formula(std::string_view s) {
    std::map<std::string, double> counts;
    std::size_t i = 0;
    if (s.empty()) return std::nullopt;
    while (i < s.size()) {
        if (!std::isupper(static_cast<unsigned char>(s[i]))) return std::nullopt;
        std::string sym(1, s[i++]);
        while (i < s.size() && std::islower(static_cast<unsigned char>(s[i]))) sym += s[i++];
        if (sym.size() > 3) return std::nullopt;
        const std::size_t start = i;
        while (i < s.size() && (std::isdigit(static_cast<unsigned char>(s[i])) || s[i] == '.')) ++i;
        double n = 1.0;
        if (i > start) {
            const std::string num(s.substr(start, i - start));
            if (std::count(num.begin(), num.end(), '.') > 1 || num.front() == '.' || num.back() == '.') return std::nullopt;
            n = std::stod(num);
        }
        counts[sym] += n;
    }
    return std::vector<std::pair<std::string, double>>(counts.begin(), counts.end());
}

std::vector<std::string> formula_order(std::vector<std::string> ids) {
    using Key = std::pair<int, std::vector<std::pair<std::string, double>>>;
    std::vector<std::pair<Key, std::string>> keyed;
    for (auto& id : ids) {
        auto f = parse_formula(id);
        keyed.push_back({f ? Key{0, std::move(*f)} : Key{1, {}}, std::move(id)});
    }
    std::sort(keyed.begin(), keyed.end());
    std::vector<std::string> out;
    for (auto& [_, id] : keyed) out.push_back(std::move(id));
    return out;
}

}  // namespace cspace
