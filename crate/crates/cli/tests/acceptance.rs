//! End-to-end acceptance run: one test per shipped criterion suite, each
//! printing a single pass/fail line.

use tsys_lab::suites;

fn run(n: usize) {
    let name = format!("criterion-{n:02}");
    let report = suites::run(&name).expect("registered suite");
    let ok = report.passed();
    println!("criterion {n}: {}", if ok { "pass" } else { "fail" });
    if !ok {
        for c in report.failures() {
            eprintln!("  failed: {} ({})", c.name, c.law);
            if let Some(w) = &c.witness {
                eprintln!("    witness: {w}");
            }
        }
    }
    assert!(ok, "{name} failed");
}

#[test]
fn criterion_01_type_a_periodicity() {
    run(1);
}

#[test]
fn criterion_02_spiral_boundary() {
    run(2);
}

#[test]
fn criterion_03_type_c_determinant_route() {
    run(3);
}

#[test]
fn criterion_04_types_d_and_b_level_2() {
    run(4);
}

#[test]
fn criterion_05_closed_form_identities() {
    run(5);
}

#[test]
fn criterion_06_bipartite_belts() {
    run(6);
}

#[test]
fn criterion_07_square_product_belt() {
    run(7);
}

#[test]
fn criterion_08_determinant_identities() {
    run(8);
}

#[test]
fn criterion_09_y_image_checks() {
    run(9);
}

#[test]
fn criterion_10_level_0() {
    run(10);
}

#[test]
fn criterion_11_level_1() {
    run(11);
}

#[test]
fn criterion_12_twisted_systems() {
    run(12);
}

#[test]
fn criterion_13_q_systems() {
    run(13);
}

#[test]
fn criterion_14_row_characters() {
    run(14);
}

#[test]
fn criterion_15_kernel_properties() {
    run(15);
}
