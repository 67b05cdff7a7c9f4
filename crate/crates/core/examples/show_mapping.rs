//! Print the shipped mapping definitions in their interchange form.
//!
//! Run with: `cargo run -p bmx-core --example show_mapping`

fn main() {
    println!("{}", bmx_core::builtin_grade_mapping().to_json());
    println!("{}", bmx_core::builtin_umlad_mapping().to_json());
}
