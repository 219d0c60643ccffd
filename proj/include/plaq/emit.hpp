#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace plaq {

// One emitted result row: {model, region, beta, bc, quantity, value, flag}.
struct Record {
    std::string model;
    std::string region;
    double beta = 0;
    std::string bc;
    std::string quantity;
    double value = 0;
    std::string flag;  // exact | lower-bound | bracket | estimate
};

inline void write_csv_header(std::ostream& os) {
    os << "model,region,beta,bc,quantity,value,flag\n";
}

inline void write_csv_row(std::ostream& os, const Record& r) {
    os.precision(17);
    os << r.model << ',' << r.region << ',' << r.beta << ',' << r.bc << ',' << r.quantity << ','
       << r.value << ',' << r.flag << '\n';
}

}  // namespace plaq
