//! Flattened, deduplicated evaluation program for one or more expressions.

use super::{checked_div, checked_powi, checked_powr, Expr, Func, Node};
use crate::error::{Error, Result};
use std::collections::HashMap;

/// Numbers the tape can run on: plain floats or Taylor jets.
pub trait Value: Clone {
    fn constant_like(v: f64, like: &Self) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Result<Self>;
    fn neg(&self) -> Self;
    fn powi(&self, k: i64) -> Result<Self>;
    fn powr(&self, p: f64) -> Result<Self>;
    fn func(&self, f: Func) -> Result<Self>;
}

impl Value for f64 {
    fn constant_like(v: f64, _: &Self) -> Self {
        v
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Result<Self> {
        checked_div(*self, *o)
    }
    fn neg(&self) -> Self {
        -self
    }
    fn powi(&self, k: i64) -> Result<Self> {
        checked_powi(*self, k)
    }
    fn powr(&self, p: f64) -> Result<Self> {
        checked_powr(*self, p)
    }
    fn func(&self, f: Func) -> Result<Self> {
        f.apply(*self)
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Op {
    Const(f64),
    Var(usize),
    Add(usize, usize),
    Sub(usize, usize),
    Mul(usize, usize),
    Div(usize, usize),
    Neg(usize),
    PowI(usize, i64),
    PowR(usize, f64),
    Func(Func, usize),
}

#[derive(Hash, PartialEq, Eq)]
enum Key {
    Const(u64),
    Var(usize),
    Bin(u8, usize, usize),
    Neg(usize),
    PowI(usize, i64),
    PowR(usize, u64),
    Func(Func, usize),
}

#[derive(Clone, Debug)]
pub struct Tape {
    ops: Vec<Op>,
    outputs: Vec<usize>,
    nvars: usize,
}

struct Builder {
    ops: Vec<Op>,
    by_key: HashMap<Key, usize>,
    by_ptr: HashMap<usize, usize>,
    nvars: usize,
}

impl Builder {
    fn push(&mut self, key: Key, op: Op) -> usize {
        if let Some(&i) = self.by_key.get(&key) {
            return i;
        }
        self.ops.push(op);
        let i = self.ops.len() - 1;
        self.by_key.insert(key, i);
        i
    }

    fn visit(&mut self, e: &Expr) -> usize {
        if let Some(&i) = self.by_ptr.get(&e.ptr_id()) {
            return i;
        }
        let i = match e.node() {
            Node::Const(_, v) => self.push(Key::Const(v.to_bits()), Op::Const(*v)),
            Node::Var(j) => {
                self.nvars = self.nvars.max(*j);
                self.push(Key::Var(*j), Op::Var(j - 1))
            }
            Node::Add(a, b) => {
                let (a, b) = (self.visit(a), self.visit(b));
                let (x, y) = (a.min(b), a.max(b));
                self.push(Key::Bin(0, x, y), Op::Add(a, b))
            }
            Node::Sub(a, b) => {
                let (a, b) = (self.visit(a), self.visit(b));
                self.push(Key::Bin(1, a, b), Op::Sub(a, b))
            }
            Node::Mul(a, b) => {
                let (a, b) = (self.visit(a), self.visit(b));
                let (x, y) = (a.min(b), a.max(b));
                self.push(Key::Bin(2, x, y), Op::Mul(a, b))
            }
            Node::Div(a, b) => {
                let (a, b) = (self.visit(a), self.visit(b));
                self.push(Key::Bin(3, a, b), Op::Div(a, b))
            }
            Node::Neg(a) => {
                let a = self.visit(a);
                self.push(Key::Neg(a), Op::Neg(a))
            }
            Node::PowI(a, k) => {
                let a = self.visit(a);
                self.push(Key::PowI(a, *k), Op::PowI(a, *k))
            }
            Node::PowR(a, p) => {
                let a = self.visit(a);
                let p = p.to_f64();
                self.push(Key::PowR(a, p.to_bits()), Op::PowR(a, p))
            }
            Node::Func(f, a) => {
                let a = self.visit(a);
                self.push(Key::Func(*f, a), Op::Func(*f, a))
            }
        };
        self.by_ptr.insert(e.ptr_id(), i);
        i
    }
}

impl Tape {
    pub fn compile(exprs: &[Expr]) -> Tape {
        let mut b = Builder { ops: Vec::new(), by_key: HashMap::new(), by_ptr: HashMap::new(), nvars: 0 };
        let outputs = exprs.iter().map(|e| b.visit(e)).collect();
        Tape { ops: b.ops, outputs, nvars: b.nvars }
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn outputs(&self) -> usize {
        self.outputs.len()
    }

    /// Number of input variables the tape reads (highest index used).
    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Evaluate into `buf` (scratch) and write the outputs into `out`.
    pub fn eval_into(&self, x: &[f64], buf: &mut Vec<f64>, out: &mut [f64]) -> Result<()> {
        if x.len() < self.nvars {
            return Err(Error::Index { index: self.nvars, max: x.len() });
        }
        buf.clear();
        for op in &self.ops {
            let v = match *op {
                Op::Const(v) => v,
                Op::Var(i) => x[i],
                Op::Add(a, b) => buf[a] + buf[b],
                Op::Sub(a, b) => buf[a] - buf[b],
                Op::Mul(a, b) => buf[a] * buf[b],
                Op::Div(a, b) => checked_div(buf[a], buf[b])?,
                Op::Neg(a) => -buf[a],
                Op::PowI(a, k) => checked_powi(buf[a], k)?,
                Op::PowR(a, p) => checked_powr(buf[a], p)?,
                Op::Func(f, a) => f.apply(buf[a])?,
            };
            buf.push(v);
        }
        for (o, &i) in out.iter_mut().zip(&self.outputs) {
            *o = buf[i];
        }
        Ok(())
    }

    pub fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut buf = Vec::with_capacity(self.ops.len());
        let mut out = vec![0.0; self.outputs.len()];
        self.eval_into(x, &mut buf, &mut out)?;
        Ok(out)
    }

    /// Evaluate over any [`Value`] type; `inputs[i]` is x_{i+1}.
    pub fn eval_values<V: Value>(&self, inputs: &[V]) -> Result<Vec<V>> {
        if inputs.len() < self.nvars {
            return Err(Error::Index { index: self.nvars, max: inputs.len() });
        }
        let like = match inputs.first() {
            Some(v) => v.clone(),
            None => {
                return Err(Error::Parameter("tape needs at least one input to fix the value shape".into()))
            }
        };
        let mut buf: Vec<V> = Vec::with_capacity(self.ops.len());
        for op in &self.ops {
            let v = match *op {
                Op::Const(v) => V::constant_like(v, &like),
                Op::Var(i) => inputs[i].clone(),
                Op::Add(a, b) => buf[a].add(&buf[b]),
                Op::Sub(a, b) => buf[a].sub(&buf[b]),
                Op::Mul(a, b) => buf[a].mul(&buf[b]),
                Op::Div(a, b) => buf[a].div(&buf[b])?,
                Op::Neg(a) => buf[a].neg(),
                Op::PowI(a, k) => buf[a].powi(k)?,
                Op::PowR(a, p) => buf[a].powr(p)?,
                Op::Func(f, a) => buf[a].func(f)?,
            };
            buf.push(v);
        }
        Ok(self.outputs.iter().map(|&i| buf[i].clone()).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    #[test]
    fn shared_subexpressions_are_merged() {
        let a = parse("exp(x1*x2) + exp(x1*x2)").unwrap();
        let b = parse("x1*x2").unwrap();
        let t = Tape::compile(&[a.clone(), b]);
        assert_eq!(t.len(), 5);
        let v = t.eval(&[0.5, 2.0]).unwrap();
        assert!((v[0] - 2.0 * 1f64.exp()).abs() < 1e-14);
        assert_eq!(v[1], 1.0);
    }

    #[test]
    fn agrees_with_tree_eval() {
        let e = parse("sqrt(x1^2 + 1)/(x2 - 3) - asinh(x1)*cos(x2)").unwrap();
        let t = Tape::compile(std::slice::from_ref(&e));
        let x = [0.4, 1.7];
        assert_eq!(t.eval(&x).unwrap()[0], e.eval(&x).unwrap());
    }
}
