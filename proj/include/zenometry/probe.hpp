// probe.hpp — Probe state descriptors shared by dynamics, metrology, fitting

#pragma once

namespace zenometry {

enum class ProbeKind { Unentangled, Ghz };

inline const char* to_string(ProbeKind k) {
    return k == ProbeKind::Ghz ? "ghz" : "unentangled";
}

struct ProbeSpec {
    ProbeKind kind = ProbeKind::Unentangled;
    int qubit_count = 1;        // n
    double system_freq = 10.0;  // w0, rad/ms
};

} // namespace zenometry
