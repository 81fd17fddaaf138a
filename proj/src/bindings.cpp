// Python bindings for the main operations: state generation, Frank-Wolfe,
// feature preparation, kernels, SVM training, and the test-circuit
// simulators. NumPy arrays map onto Eigen types.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "entanglekit/datagen.hpp"
#include "entanglekit/dataset_io.hpp"
#include "entanglekit/features.hpp"
#include "entanglekit/qsim.hpp"
#include "entanglekit/svm.hpp"

namespace py = pybind11;
using namespace entanglekit;

namespace {

BipartiteDims make_dims(int dA, int dB) { return BipartiteDims(dA, dB); }

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "entanglekit core: bipartite entanglement datasets, kernels, SVMs, "
              "and test-circuit simulation";

    py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);
    py::register_exception<ContractViolation>(m, "ContractViolation", PyExc_ValueError);
    py::register_exception<NormalizationError>(m, "NormalizationError", PyExc_ValueError);
    py::register_exception<GenerationExhausted>(m, "GenerationExhausted", PyExc_RuntimeError);
    py::register_exception<CalibrationError>(m, "CalibrationError", PyExc_RuntimeError);
    py::register_exception<CapacityError>(m, "CapacityError", PyExc_ValueError);

    py::class_<RandomStream>(m, "RandomStream")
        .def(py::init<std::uint64_t>(), py::arg("seed"))
        .def("uniform", &RandomStream::uniform)
        .def("gaussian", &RandomStream::gaussian);

    py::class_<BipartiteDims>(m, "BipartiteDims")
        .def(py::init(&make_dims), py::arg("dA"), py::arg("dB"))
        .def_readonly("dA", &BipartiteDims::dA)
        .def_readonly("dB", &BipartiteDims::dB)
        .def("total", &BipartiteDims::total);

    // qstate-core
    m.def("tensor_product", &tensor_product, py::arg("a"), py::arg("b"));
    m.def(
        "partial_transpose",
        [](const CMatrix& rho, const BipartiteDims& dims, const std::string& which) {
            return partial_transpose(rho, dims,
                                     which == "A" ? Subsystem::A : Subsystem::B);
        },
        py::arg("rho"), py::arg("dims"), py::arg("subsystem") = "B");
    m.def(
        "hermitian_eig",
        [](const CMatrix& h) {
            EigResult r = hermitian_eig(h);
            return py::make_tuple(r.values, r.vectors);
        },
        py::arg("matrix"));
    m.def(
        "is_ppt",
        [](const CMatrix& rho, const BipartiteDims& dims, double tol) {
            return is_ppt(rho, dims, tol);
        },
        py::arg("rho"), py::arg("dims"), py::arg("tol") = 1e-10);
    m.def("purity", py::overload_cast<const CMatrix&>(&purity), py::arg("rho"));
    m.def(
        "schmidt_decompose",
        [](const CVector& psi, const BipartiteDims& dims) {
            SchmidtForm s = schmidt_decompose(psi, dims);
            return py::make_tuple(s.coefficients, s.left_vectors, s.right_vectors, s.rank);
        },
        py::arg("psi"), py::arg("dims"));
    m.def("vectorize", py::overload_cast<const CMatrix&>(&vectorize), py::arg("rho"));
    m.def("devectorize", &devectorize, py::arg("v"));
    m.def(
        "bloch_vector",
        [](const CMatrix& rho) { return bloch_vector(rho).components; },
        py::arg("rho"));

    // datagen
    m.def(
        "random_density",
        [](int d, std::uint64_t seed) {
            RandomStream rng(seed);
            return random_density(d, rng);
        },
        py::arg("d"), py::arg("seed"));
    m.def(
        "random_separable",
        [](const BipartiteDims& dims, int k, std::uint64_t seed) {
            RandomStream rng(seed);
            return random_separable(dims, k, rng);
        },
        py::arg("dims"), py::arg("k"), py::arg("seed"));
    m.def(
        "random_nppt",
        [](const BipartiteDims& dims, int k, std::uint64_t seed, int max_tries) {
            RandomStream rng(seed);
            return random_nppt(dims, k, rng, max_tries);
        },
        py::arg("dims"), py::arg("k"), py::arg("seed"), py::arg("max_tries") = 100000);
    m.def(
        "frank_wolfe_nearest_separable",
        [](const CMatrix& rho, const BipartiteDims& dims, int iterations, std::uint64_t seed) {
            RandomStream rng(seed);
            FwResult r = frank_wolfe_nearest_separable(rho, dims, iterations, rng);
            return py::make_tuple(r.sigma, r.distance);
        },
        py::arg("rho"), py::arg("dims"), py::arg("iterations") = 1000, py::arg("seed") = 0);

    // features
    py::class_<PcaModel>(m, "PcaModel")
        .def_readonly("input_dim", &PcaModel::input_dim)
        .def_readonly("n_components", &PcaModel::n_components)
        .def_readonly("mean", &PcaModel::mean)
        .def_readonly("components", &PcaModel::components)
        .def_readonly("explained_variance", &PcaModel::explained_variance);
    m.def("fit_pca", &fit_pca, py::arg("samples"), py::arg("n_components"));
    m.def("pca_transform",
          py::overload_cast<const PcaModel&, const RMatrix&>(&pca_transform),
          py::arg("model"), py::arg("samples"));
    m.def("amplitude_prepare", &amplitude_prepare, py::arg("x"), py::arg("n_qubits"));
    m.def(
        "qubits_for",
        [](int system_d, bool use_pca) {
            QubitPlan p = qubits_for(system_d, use_pca);
            return py::make_tuple(p.n_qubits, p.n_components);
        },
        py::arg("system_d"), py::arg("use_pca") = true);

    // kernels
    py::class_<KernelSpec>(m, "KernelSpec")
        .def(py::init([](const std::string& kind, double gamma, int degree) {
                 KernelSpec s{kernel_kind_from_name(kind), gamma, degree};
                 s.validate();
                 return s;
             }),
             py::arg("kind"), py::arg("gamma") = 1.0, py::arg("degree") = 2)
        .def_readonly("gamma", &KernelSpec::gamma)
        .def_readonly("degree", &KernelSpec::degree)
        .def("__repr__", &KernelSpec::to_string);
    m.def("kernel_eval", &kernel_eval, py::arg("spec"), py::arg("x"), py::arg("y"));
    m.def("gram_matrix",
          py::overload_cast<const KernelSpec&, const RMatrix&, int>(&gram_matrix),
          py::arg("spec"), py::arg("x"), py::arg("jobs") = 1);
    m.def("gram_matrix_cross",
          py::overload_cast<const KernelSpec&, const RMatrix&, const RMatrix&, int>(&gram_matrix),
          py::arg("spec"), py::arg("x"), py::arg("y"), py::arg("jobs") = 1);

    // svm
    py::class_<SvmModel>(m, "SvmModel")
        .def_readonly("support_indices", &SvmModel::support_indices)
        .def_readonly("alphas", &SvmModel::alphas)
        .def_readonly("sv_labels", &SvmModel::sv_labels)
        .def_readonly("bias", &SvmModel::bias)
        .def_readonly("C", &SvmModel::C)
        .def_readonly("converged", &SvmModel::converged);
    m.def(
        "svm_train",
        [](const RMatrix& x, const std::vector<int>& y, const KernelSpec& spec, double C,
           double tol) {
            return train(x, y, spec, {C, tol, 10000});
        },
        py::arg("x"), py::arg("y"), py::arg("spec"), py::arg("C") = 1.0,
        py::arg("tol") = 1e-3);
    m.def(
        "svm_train_on_gram",
        [](const RMatrix& gram, const std::vector<int>& y, double C, double tol) {
            return train_on_gram(gram, y, {C, tol, 10000});
        },
        py::arg("gram"), py::arg("y"), py::arg("C") = 1.0, py::arg("tol") = 1e-3);
    m.def(
        "svm_predict",
        [](const SvmModel& model, const RVector& x) {
            Prediction p = predict(model, x);
            return py::make_tuple(p.label, p.decision);
        },
        py::arg("model"), py::arg("x"));
    m.def("decision_values", &decision_values, py::arg("model"), py::arg("gram_train_by_x"));
    m.def("stratified_kfold", &stratified_kfold, py::arg("y"), py::arg("k"), py::arg("seed"));

    // qsim
    m.def(
        "swap_test_p0",
        [](const CVector& psi, const CVector& phi, int n_qubits) {
            return swap_test_p0(StateVector(n_qubits, psi), StateVector(n_qubits, phi));
        },
        py::arg("psi"), py::arg("phi"), py::arg("n_qubits"));
    m.def(
        "hadamard_test_p0",
        [](const CVector& psi, const CVector& phi, int n_qubits, const std::string& part) {
            return hadamard_test_p0(StateVector(n_qubits, psi), StateVector(n_qubits, phi),
                                    part == "Im" ? OverlapPart::Im : OverlapPart::Re);
        },
        py::arg("psi"), py::arg("phi"), py::arg("n_qubits"), py::arg("part") = "Re");
    m.def(
        "shots_required",
        [](double epsilon, double delta) { return shots_required(epsilon, delta).shots; },
        py::arg("epsilon"), py::arg("delta"));
    m.def(
        "sampled_kernel",
        [](const RVector& x, const RVector& y, long shots, std::uint64_t seed) {
            RandomStream rng(seed);
            return sampled_kernel(x, y, shots, rng);
        },
        py::arg("x"), py::arg("y"), py::arg("shots"), py::arg("seed") = 0);
}
