macro_rules! example {
    ($name:ident, $file:literal) => {
        #[allow(dead_code)]
        mod $name {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", $file));
        }
    };
}

example!(flag_complex, "flag_complex.rs");
example!(persistence_diagram, "persistence_diagram.rs");
example!(local_stalks, "local_stalks.rs");
example!(sheaf_laplacian, "sheaf_laplacian.rs");
example!(diffusion, "diffusion.rs");
example!(sign_equivariant_layer, "sign_equivariant_layer.rs");
example!(oracle_verify, "oracle_verify.rs");

#[test]
fn examples_run() {
    flag_complex::run_example().unwrap();
    persistence_diagram::run_example().unwrap();
    local_stalks::run_example().unwrap();
    sheaf_laplacian::run_example().unwrap();
    diffusion::run_example().unwrap();
    sign_equivariant_layer::run_example().unwrap();
    oracle_verify::run_example().unwrap();
}
