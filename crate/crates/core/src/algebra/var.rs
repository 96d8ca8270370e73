use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Mutex, OnceLock};

use serde::{Deserialize, Serialize};

fn interner() -> &'static Mutex<HashSet<&'static str>> {
    static POOL: OnceLock<Mutex<HashSet<&'static str>>> = OnceLock::new();
    POOL.get_or_init(|| Mutex::new(HashSet::new()))
}

/// An interned symbol name. Equality is pointer equality; ordering is the
/// natural order of names (`a2 < a10`), so every listing is deterministic.
#[derive(Clone, Copy)]
pub struct Var(&'static str);

impl Var {
    pub fn new(name: &str) -> Var {
        let mut pool = interner().lock().expect("symbol pool poisoned");
        if let Some(&s) = pool.get(name) {
            return Var(s);
        }
        let s: &'static str = Box::leak(name.to_owned().into_boxed_str());
        pool.insert(s);
        Var(s)
    }

    pub fn name(&self) -> &'static str {
        self.0
    }
}

impl PartialEq for Var {
    fn eq(&self, other: &Var) -> bool {
        std::ptr::eq(self.0.as_ptr(), other.0.as_ptr())
    }
}

impl Eq for Var {}

impl Hash for Var {
    fn hash<H: Hasher>(&self, state: &mut H) {
        (self.0.as_ptr() as usize).hash(state)
    }
}

impl Ord for Var {
    fn cmp(&self, other: &Var) -> Ordering {
        if self == other {
            Ordering::Equal
        } else {
            natural_cmp(self.0, other.0)
        }
    }
}

impl PartialOrd for Var {
    fn partial_cmp(&self, other: &Var) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.0)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.0)
    }
}

impl Serialize for Var {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.0)
    }
}

impl<'de> Deserialize<'de> for Var {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Var, D::Error> {
        let s = String::deserialize(d)?;
        Ok(Var::new(&s))
    }
}

/// Compare names treating maximal digit runs as numbers.
fn natural_cmp(a: &str, b: &str) -> Ordering {
    let (ab, bb) = (a.as_bytes(), b.as_bytes());
    let (mut i, mut j) = (0, 0);
    while i < ab.len() && j < bb.len() {
        if ab[i].is_ascii_digit() && bb[j].is_ascii_digit() {
            let si = i;
            while i < ab.len() && ab[i].is_ascii_digit() {
                i += 1;
            }
            let sj = j;
            while j < bb.len() && bb[j].is_ascii_digit() {
                j += 1;
            }
            let da = a[si..i].trim_start_matches('0');
            let db = b[sj..j].trim_start_matches('0');
            let ord = da.len().cmp(&db.len()).then_with(|| da.cmp(db));
            if ord != Ordering::Equal {
                return ord;
            }
        } else {
            let ord = ab[i].cmp(&bb[j]);
            if ord != Ordering::Equal {
                return ord;
            }
            i += 1;
            j += 1;
        }
    }
    (ab.len() - i).cmp(&(bb.len() - j)).then_with(|| a.cmp(b))
}

/// What a symbol stands for in a computation context.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SymKind {
    Time,
    Parameter,
    Unknown,
}

/// A declared symbol: a name plus its role in the context that declared it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Sym {
    pub var: Var,
    pub kind: SymKind,
}

impl Sym {
    pub fn time() -> Sym {
        Sym { var: Var::new("t"), kind: SymKind::Time }
    }
    pub fn param(name: &str) -> Sym {
        Sym { var: Var::new(name), kind: SymKind::Parameter }
    }
    pub fn unknown(name: &str) -> Sym {
        Sym { var: Var::new(name), kind: SymKind::Unknown }
    }
}

/// The time variable `t`.
pub fn t_var() -> Var {
    Var::new("t")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interning_is_stable() {
        assert_eq!(Var::new("alpha1"), Var::new("alpha1"));
        assert_ne!(Var::new("alpha1"), Var::new("alpha2"));
    }

    #[test]
    fn natural_order() {
        assert!(Var::new("a2") < Var::new("a10"));
        assert!(Var::new("a10") < Var::new("b1"));
        assert!(Var::new("x") < Var::new("y"));
        assert!(Var::new("X") < Var::new("X1"));
    }
}
