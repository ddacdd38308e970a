//! Writes the benchmark corpus as OpenQASM 2.0 files.
//!
//! ```text
//! cargo run -p distq-cli --example gen_corpus -- corpus
//! ```
//!
//! Toffolis are written out in their 15-gate Clifford+T form.

use std::f64::consts::PI;
use std::path::PathBuf;

use distq_core::circuit::toffoli_gates;
use distq_core::{emit_qasm, Circuit, Gate};

struct B {
    c: Circuit,
}

impl B {
    fn new(n: usize) -> Self {
        Self {
            c: Circuit::new(n, 0),
        }
    }
    fn g(&mut self, gate: Gate) {
        self.c.push(gate).expect("valid gate");
    }
    fn h(&mut self, q: usize) {
        self.g(Gate::H(q));
    }
    fn x(&mut self, q: usize) {
        self.g(Gate::X(q));
    }
    fn cx(&mut self, control: usize, target: usize) {
        self.g(Gate::Cx { control, target });
    }
    fn tof(&mut self, a: usize, b: usize, c: usize) {
        self.c.extend(toffoli_gates(a, b, c)).expect("valid gate");
    }
    fn cphase(&mut self, c: usize, t: usize, theta: f64) {
        self.g(Gate::Rz(c, theta / 2.0));
        self.cx(c, t);
        self.g(Gate::Rz(t, -theta / 2.0));
        self.cx(c, t);
        self.g(Gate::Rz(t, theta / 2.0));
    }
    fn done(self) -> Circuit {
        self.c
    }
}

/// Multi-controlled X over `m` controls with a clean ancilla ladder.
/// Layout: controls, ancillas, target.
fn tof_n(m: usize) -> Circuit {
    let anc = |i: usize| m + i;
    let t = 2 * m - 2;
    let mut b = B::new(2 * m - 1);
    let mut ladder = vec![(0, 1, anc(0))];
    for i in 1..m - 2 {
        ladder.push((anc(i - 1), i + 1, anc(i)));
    }
    for &(x, y, z) in &ladder {
        b.tof(x, y, z);
    }
    b.tof(anc(m - 3), m - 1, t);
    for &(x, y, z) in ladder.iter().rev() {
        b.tof(x, y, z);
    }
    b.done()
}

/// Multi-controlled X over `m` controls with the V-chain of Toffolis on
/// borrowed ancillas. Same layout as [`tof_n`].
fn barenco_tof_n(m: usize) -> Circuit {
    let anc = |i: usize| m + i;
    let t = 2 * m - 2;
    let mut b = B::new(2 * m - 1);
    let top = (m - 1, anc(m - 3), t);
    let middle: Vec<_> = (0..m - 3)
        .rev()
        .map(|i| (i + 2, anc(i), anc(i + 1)))
        .collect();
    let bottom = (0, 1, anc(0));
    for _ in 0..2 {
        b.tof(top.0, top.1, top.2);
        for &(x, y, z) in &middle {
            b.tof(x, y, z);
        }
        b.tof(bottom.0, bottom.1, bottom.2);
        for &(x, y, z) in middle.iter().rev() {
            b.tof(x, y, z);
        }
    }
    b.done()
}

/// `c ^= a * b` in GF(2^n) modulo `x^n + sum(x^k for k in middle) + 1`.
/// Layout: a, b, c.
fn gf2_mult(n: usize, middle: &[usize]) -> Circuit {
    let mut b = B::new(3 * n);
    // Physical position of c's coefficient j; multiplying by x rotates it.
    let mut pos: Vec<usize> = (0..n).map(|j| 2 * n + j).collect();
    for i in (0..n).rev() {
        if i != n - 1 {
            pos.rotate_right(1);
            for &k in middle {
                b.cx(pos[0], pos[k]);
            }
        }
        for (j, &p) in pos.iter().enumerate() {
            b.tof(j, n + i, p);
        }
    }
    b.done()
}

/// Grover search over 5 data qubits for one marked string, with 3 ladder
/// ancillas and a phase-kickback target. Layout: data, ancillas, target.
fn grover() -> Circuit {
    let (a, t) = (5, 8);
    let marked = [true, false, true, true, false];
    let mut b = B::new(9);
    for q in 0..5 {
        b.h(q);
    }
    b.x(t);
    b.h(t);
    for _ in 0..4 {
        for q in (0..5).filter(|&q| !marked[q]) {
            b.x(q);
        }
        let ladder = [(0, 1, a), (a, 2, a + 1), (a + 1, 3, a + 2)];
        for &(x, y, z) in &ladder {
            b.tof(x, y, z);
        }
        b.tof(a + 2, 4, t);
        for &(x, y, z) in ladder.iter().rev() {
            b.tof(x, y, z);
        }
        for q in (0..5).filter(|&q| !marked[q]) {
            b.x(q);
        }
        for q in 0..5 {
            b.h(q);
            b.x(q);
        }
        b.h(4);
        let ladder = [(0, 1, a), (a, 2, a + 1)];
        for &(x, y, z) in &ladder {
            b.tof(x, y, z);
        }
        b.tof(a + 1, 3, 4);
        for &(x, y, z) in ladder.iter().rev() {
            b.tof(x, y, z);
        }
        b.h(4);
        for q in 0..5 {
            b.x(q);
            b.h(q);
        }
    }
    b.done()
}

/// Ripple-carry adder with separate carry qubits: `b += a` over `n` bits,
/// carry out into the extra top bit of `b`. With `carry_in` false the zero
/// carry into bit 0 is elided along with the gates that read it.
///
/// Layout per bit: `[c_i] a_i b_i`, then the top bit of `b`.
fn vbe_adder(n: usize, carry_in: bool) -> Circuit {
    let off = usize::from(!carry_in);
    let a = |i: usize| 3 * i + 1 - off;
    let bq = |i: usize| 3 * i + 2 - off;
    let top = 3 * n - off;
    // c_i for i ≥ 1; c_0 only when present. c_n is the top bit of b.
    let c = |i: usize| if i == n { top } else { 3 * i - off };
    let mut b = B::new(top + 1);
    let has_c = |i: usize| i > 0 || carry_in;
    for i in 0..n {
        b.tof(a(i), bq(i), c(i + 1));
        b.cx(a(i), bq(i));
        if has_c(i) {
            b.tof(c(i), bq(i), c(i + 1));
        }
    }
    b.cx(a(n - 1), bq(n - 1));
    let sum = |b: &mut B, i: usize| {
        b.cx(a(i), bq(i));
        if has_c(i) {
            b.cx(c(i), bq(i));
        }
    };
    sum(&mut b, n - 1);
    for i in (0..n - 1).rev() {
        if has_c(i) {
            b.tof(c(i), bq(i), c(i + 1));
        }
        b.cx(a(i), bq(i));
        b.tof(a(i), bq(i), c(i + 1));
        sum(&mut b, i);
    }
    b.done()
}

/// In-place majority ripple adder: `b += a` over `n` bits with a carry-in
/// qubit and a carry-out qubit. Layout: c0, then (b_i, a_i) pairs, then z.
fn rc_adder(n: usize) -> Circuit {
    let bq = |i: usize| 1 + 2 * i;
    let a = |i: usize| 2 + 2 * i;
    let z = 2 * n + 1;
    let mut b = B::new(2 * n + 2);
    let prev = |i: usize| if i == 0 { 0 } else { a(i - 1) };
    for i in 0..n {
        let (c, y, x) = (prev(i), bq(i), a(i));
        b.cx(x, y);
        b.cx(x, c);
        b.tof(c, y, x);
    }
    b.cx(a(n - 1), z);
    for i in (0..n).rev() {
        let (c, y, x) = (prev(i), bq(i), a(i));
        b.tof(c, y, x);
        b.cx(x, c);
        b.cx(c, y);
    }
    b.done()
}

/// Flags 4-bit inputs divisible by 5 (`x3 x2 == x1 x0`) on qubit 4.
fn mod5_4() -> Circuit {
    let mut b = B::new(5);
    b.cx(2, 0);
    b.cx(3, 1);
    b.x(0);
    b.x(1);
    b.tof(0, 1, 4);
    b.x(1);
    b.x(0);
    b.cx(3, 1);
    b.cx(2, 0);
    b.done()
}

/// Textbook QFT on 4 qubits, controlled phases as rz and two cx, followed by
/// the bit-reversal swaps.
fn qft(n: usize) -> Circuit {
    let mut b = B::new(n);
    for i in 0..n {
        b.h(i);
        for j in i + 1..n {
            b.cphase(j, i, PI / f64::from(1u32 << (j - i)));
        }
    }
    for i in 0..n / 2 {
        let j = n - 1 - i;
        b.cx(i, j);
        b.cx(j, i);
        b.cx(i, j);
    }
    b.done()
}

fn corpus() -> Vec<(String, Circuit)> {
    let mut out = vec![
        ("adder_8".to_string(), vbe_adder(8, false)),
        ("grover_8+1".to_string(), grover()),
        ("mod5_4".to_string(), mod5_4()),
        ("qft_4".to_string(), qft(4)),
        ("rc_adder_6".to_string(), rc_adder(6)),
        ("vbe_adder_3".to_string(), vbe_adder(3, true)),
    ];
    for (n, middle) in [
        (4, &[1][..]),
        (6, &[1]),
        (7, &[1]),
        (8, &[1, 3, 4]),
        (10, &[3]),
    ] {
        out.push((format!("gf2^{n}_mult"), gf2_mult(n, middle)));
    }
    for m in [3, 4, 5, 10] {
        out.push((format!("tof_{m}"), tof_n(m)));
        out.push((format!("barenco_tof_{m}"), barenco_tof_n(m)));
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "corpus".into()));
    std::fs::create_dir_all(&dir)?;
    for (name, c) in corpus() {
        let path = dir.join(format!("{name}.qasm"));
        std::fs::write(&path, emit_qasm(&c)?)?;
        println!(
            "{}\t{} qubits\t{} gates",
            path.display(),
            c.num_qubits,
            c.len()
        );
    }
    Ok(())
}
