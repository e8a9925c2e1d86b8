// Link against the system reference LAPACK/BLAS used by the dense oracle.
fn main() {
    println!("cargo:rustc-link-lib=lapack");
    println!("cargo:rustc-link-lib=blas");
}
