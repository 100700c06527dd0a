#pragma once

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "kext/classify.hpp"
#include "kext/dynsys.hpp"
#include "kext/periods.hpp"
#include "kext/separation.hpp"

// Deterministic text output: every double is printed with 17 significant
// digits so files round-trip bit-exactly.

namespace kext {

inline std::string format_double(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

inline std::ofstream open_output(const std::string& path)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot open output file: " + path);
    return out;
}

inline void write_csv_row(std::ofstream& out, const std::vector<double>& row)
{
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (i)
            out << ',';
        out << format_double(row[i]);
    }
    out << '\n';
}

inline void export_trajectory_csv(const Trajectory& traj,
                                  const std::string& path)
{
    std::ofstream out = open_output(path);
    out << "y,phi1,phi2,dphi1,dphi2,H1,H2\n";
    for (const PhaseState& s : traj.nodes()) {
        const FirstIntegralValues fi = first_integrals(s, traj.param());
        write_csv_row(out, {s.y, s.phi1, s.phi2, s.dphi1, s.dphi2, fi.h1,
                            fi.h2});
    }
}

inline void export_separated_csv(const SeparatedTrajectory& st,
                                 const std::string& path)
{
    std::ofstream out = open_output(path);
    out << "tau,y,u,v,du,dv\n";
    for (std::size_t i = 0; i < st.y.size(); ++i) {
        const SeparatedState& s = st.states[i];
        write_csv_row(out, {s.tau, st.y[i], s.u, s.v, s.du, s.dv});
    }
}

inline void export_period_table_csv(const std::vector<PeriodPair>& rows,
                                    const std::string& path)
{
    std::ofstream out = open_output(path);
    out << "p,T_u,T_v,R,err_u,err_v\n";
    for (const PeriodPair& r : rows)
        write_csv_row(out, {r.p, r.t_u, r.t_v, r.ratio(), r.err_u, r.err_v});
}

} // namespace kext
