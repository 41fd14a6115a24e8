#include "source.hpp"

#include <cstdio>
#include <sstream>

namespace gdyn {

SourceSpec SourceSpec::parse(const std::string& text) {
    SourceSpec spec;
    std::stringstream ss(text);
    std::string term;
    while (std::getline(ss, term, ';')) {
        if (term.find_first_not_of(" \t\r\n") == std::string::npos) continue;
        double re = 0, im = 0;
        int count = 1;
        int fields = std::sscanf(term.c_str(), " %lf , %lf * %d", &re, &im, &count);
        if (fields < 2)
            fail(errc::invalid_argument, "SourceSpec::parse: bad term '" + term + "'");
        if (fields == 2) count = 1;
        if (count < 1) fail(errc::invalid_argument, "SourceSpec::parse: count must be >= 1");
        spec.entries.emplace_back(Complex(re, im), count);
    }
    if (spec.entries.empty()) fail(errc::invalid_argument, "SourceSpec::parse: empty source");
    return spec;
}

std::string SourceSpec::to_string() const {
    std::string out;
    char buf[96];
    for (const auto& [v, c] : entries) {
        if (!out.empty()) out += ';';
        std::snprintf(buf, sizeof buf, "%.17g,%.17g*%d", v.real(), v.imag(), c);
        out += buf;
    }
    return out;
}

}  // namespace gdyn
