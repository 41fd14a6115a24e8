#pragma once

#include <string>
#include <utility>
#include <vector>

#include "linalg.hpp"

namespace gdyn {

// Normal initial condition X0 = diag(a_1..a_N), stored multiplicity-aware.
struct SourceSpec {
    std::vector<std::pair<Complex, int>> entries;  // (value, count)

    int total() const {
        int t = 0;
        for (const auto& [v, c] : entries) t += c;
        return t;
    }

    Vector expand() const {
        Vector a(total());
        int k = 0;
        for (const auto& [v, c] : entries)
            for (int i = 0; i < c; ++i) a[k++] = v;
        return a;
    }

    static SourceSpec ginibre(int n) { return SourceSpec{{{Complex(0, 0), n}}}; }

    static SourceSpec spiric(Complex a, int n) {
        if (n % 2 != 0) fail(errc::invalid_argument, "spiric source needs even N");
        return SourceSpec{{{a, n / 2}, {-a, n / 2}}};
    }

    // Text form: semicolon-separated "re,im" or "re,im*count" terms,
    // e.g. "0,0*4" or "1,0.5;-1,-0.5".
    static SourceSpec parse(const std::string& text);
    std::string to_string() const;
};

}  // namespace gdyn
