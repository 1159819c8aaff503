#include "pixelarray/gam.hpp"

namespace pixelarray {

namespace {

void require_dim(int value, const char* what) {
  if (value < 2) {
    fail(Errc::bad_resolution, std::string(what) + " must be >= 2");
  }
}

Port port(const std::string& name, int resolution) {
  return Port{name, 0.0, 1.0, resolution};
}

}  // namespace

WiringDiagram specialization_diagram(const MatmulDims& dims) {
  require_dim(dims.m, "m");
  require_dim(dims.n, "n");
  require_dim(dims.p, "p");
  Pack left = make_pack({port("m", dims.m), port("n", dims.n)});
  Pack right = make_pack({port("n", dims.n), port("p", dims.p)});
  Pack outer = make_pack({port("m", dims.m), port("p", dims.p)});
  return WiringDiagram::create({left, right}, outer, {{"m", "n"}, {"n", "p"}}, {"m", "p"});
}

WiringDiagram specialization_diagram(const TraceDims& dims) {
  require_dim(dims.n, "n");
  Pack inner = make_pack({port("n_in", dims.n), port("n_out", dims.n)});
  return WiringDiagram::create({inner}, Pack{}, {{"n", "n"}}, {});
}

WiringDiagram specialization_diagram(const KroneckerDims& dims) {
  require_dim(dims.m1, "m1");
  require_dim(dims.n1, "n1");
  require_dim(dims.m2, "m2");
  require_dim(dims.n2, "n2");
  Pack first = make_pack({port("m1", dims.m1), port("n1", dims.n1)});
  Pack second = make_pack({port("m2", dims.m2), port("n2", dims.n2)});
  Pack outer = make_pack({port("m1", dims.m1), port("n1", dims.n1), port("m2", dims.m2),
                          port("n2", dims.n2)});
  return WiringDiagram::create({first, second}, outer, {{"m1", "n1"}, {"m2", "n2"}},
                               {"m1", "m2", "n1", "n2"});
}

}  // namespace pixelarray
