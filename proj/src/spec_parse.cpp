#include "ldp/spec_parse.hpp"

#include <filesystem>
#include <map>
#include <sstream>

#include "ldp/catalog.hpp"

namespace ldp {

namespace {

std::map<std::string, std::string> parse_kv(const std::string& args, const std::string& family) {
    std::map<std::string, std::string> kv;
    std::stringstream ss(args);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos)
            throw parse_error("ParseError: expected key=value in '" + family + ":" + args + "'");
        kv[item.substr(0, eq)] = item.substr(eq + 1);
    }
    return kv;
}

double get_num(const std::map<std::string, std::string>& kv, const std::string& key,
               const std::string& family) {
    auto it = kv.find(key);
    if (it == kv.end())
        throw parse_error("ParseError: " + family + " needs parameter '" + key + "'");
    try {
        std::size_t pos = 0;
        const double v = std::stod(it->second, &pos);
        if (pos != it->second.size()) throw parse_error("");
        return v;
    } catch (...) {
        throw parse_error("ParseError: bad numeric value '" + it->second + "' for '" + key + "'");
    }
}

int get_int(const std::map<std::string, std::string>& kv, const std::string& key,
            const std::string& family) {
    const double v = get_num(kv, key, family);
    const int i = static_cast<int>(v);
    if (double(i) != v) throw parse_error("ParseError: '" + key + "' must be an integer");
    return i;
}

}  // namespace

Protocol parse_protocol_spec(const std::string& spec) {
    const auto colon = spec.find(':');
    const std::string family = spec.substr(0, colon);
    const auto kv = colon == std::string::npos ? std::map<std::string, std::string>{}
                                               : parse_kv(spec.substr(colon + 1), family);
    try {
        if (family == "grr") return grr(get_int(kv, "a", family), get_num(kv, "eps", family));
        if (family == "ue")
            return unary_encoding(get_int(kv, "a", family),
                                  {get_num(kv, "kappa", family), get_num(kv, "lambda", family)});
        if (family == "oue") return oue(get_int(kv, "a", family), get_num(kv, "eps", family));
        if (family == "rappor") return rappor_basic(get_int(kv, "a", family), get_num(kv, "eps", family));
        if (family == "blh") return blh(get_int(kv, "a", family), get_num(kv, "eps", family));
        if (family == "lh")
            return local_hash(get_int(kv, "a", family), get_int(kv, "g", family),
                              get_num(kv, "eps", family));
        if (family == "parity") return parity(get_int(kv, "a", family));
        if (family == "id") return identity(get_int(kv, "a", family));
    } catch (const validation_error& e) {
        throw parse_error(std::string("ParseError: ") + e.what());
    }
    throw parse_error("ParseError: unknown protocol family '" + family + "'");
}

Protocol load_protocol(const std::string& spec_or_path) {
    std::error_code ec;
    if (std::filesystem::exists(spec_or_path, ec)) return load_protocol_file(spec_or_path);
    return parse_protocol_spec(spec_or_path);
}

DirichletPrior parse_prior_spec(const std::string& spec, int a) {
    if (spec == "jeffreys") return jeffreys(a);
    const std::string prefix = "dirichlet:";
    if (spec.rfind(prefix, 0) == 0) {
        std::vector<double> alpha;
        std::stringstream ss(spec.substr(prefix.size()));
        std::string item;
        while (std::getline(ss, item, ',')) {
            try {
                alpha.push_back(std::stod(item));
            } catch (...) {
                throw parse_error("ParseError: bad Dirichlet parameter '" + item + "'");
            }
        }
        if (static_cast<int>(alpha.size()) != a) {
            std::ostringstream msg;
            msg << "ParseError: prior has " << alpha.size() << " parameters but the protocol has a = " << a;
            throw parse_error(msg.str());
        }
        try {
            return DirichletPrior::checked(std::move(alpha));
        } catch (const validation_error& e) {
            throw parse_error(std::string("ParseError: ") + e.what());
        }
    }
    throw parse_error("ParseError: unknown prior spec '" + spec + "'");
}

}  // namespace ldp
