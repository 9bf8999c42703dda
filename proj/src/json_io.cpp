#include "manin/json_io.hpp"

#include <fstream>

namespace manin {

ordered_json rational_to_json(const mpq_class& q) {
    return ordered_json{{"num", q.get_num().get_str()}, {"den", q.get_den().get_str()}};
}

mpq_class rational_from_json(const ordered_json& j) {
    if (!j.is_object() || !j.contains("num") || !j.contains("den"))
        throw FormParseError("rational value must be an object with \"num\" and \"den\"");
    mpq_class q(mpz_class(j.at("num").get<std::string>()),
                mpz_class(j.at("den").get<std::string>()));
    q.canonicalize();
    return q;
}

ordered_json form_to_json(const TrilinearForm& f) {
    ordered_json coeffs = ordered_json::array();
    for (const auto& c : f.sparse())
        coeffs.push_back(ordered_json{{"i", c.i}, {"j", c.j}, {"k", c.k}, {"a", c.a}});
    return ordered_json{{"n", f.n()}, {"coeffs", std::move(coeffs)}};
}

TrilinearForm form_from_json(const ordered_json& j) {
    if (!j.is_object()) throw FormParseError("form: top level must be a JSON object");
    if (!j.contains("n") || !j.at("n").is_number_integer())
        throw FormParseError("form: missing or non-integer field \"n\"");
    const int n = j.at("n").get<int>();
    if (!j.contains("coeffs") || !j.at("coeffs").is_array())
        throw FormParseError("form: missing or non-array field \"coeffs\"");
    std::vector<SparseCoeff> cs;
    std::size_t pos = 0;
    for (const auto& e : j.at("coeffs")) {
        const std::string where = "form: coeffs[" + std::to_string(pos) + "]";
        if (!e.is_object()) throw FormParseError(where + " must be an object");
        for (const char* field : {"i", "j", "k", "a"})
            if (!e.contains(field) || !e.at(field).is_number_integer())
                throw FormParseError(where + ": missing or non-integer field \"" + field + "\"");
        cs.push_back({e.at("i").get<int>(), e.at("j").get<int>(), e.at("k").get<int>(),
                      e.at("a").get<Int>()});
        ++pos;
    }
    try {
        return TrilinearForm(n, cs);
    } catch (const std::invalid_argument& err) {
        throw FormParseError(std::string("form: ") + err.what());
    }
}

TrilinearForm load_form_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormParseError("cannot open form file: " + path);
    ordered_json j;
    try {
        j = ordered_json::parse(in);
    } catch (const nlohmann::json::parse_error& err) {
        // err.byte gives the offset of the failure inside the file.
        throw FormParseError("form file " + path + ": " + err.what());
    }
    try {
        return form_from_json(j);
    } catch (const FormParseError& err) {
        throw FormParseError("form file " + path + ": " + err.what());
    }
}

void save_form_file(const TrilinearForm& f, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write form file: " + path);
    out << form_to_json(f).dump(2) << "\n";
}

}  // namespace manin
