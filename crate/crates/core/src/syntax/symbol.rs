use std::fmt;
use std::sync::Arc;

macro_rules! symbol {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name(Arc<str>);

        impl $name {
            pub fn new(s: impl AsRef<str>) -> Self {
                $name(Arc::from(s.as_ref()))
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                $name::new(s)
            }
        }

        impl From<String> for $name {
            fn from(s: String) -> Self {
                $name(Arc::from(s))
            }
        }

        impl std::borrow::Borrow<str> for $name {
            fn borrow(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl fmt::Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}({:?})", stringify!($name), &*self.0)
            }
        }
    };
}

symbol!(
    /// A rigid variable, bound by `[x := t]`.
    Var
);
symbol!(
    /// A non-rigid name whose denotation can differ between worlds.
    Name
);
symbol!(Agent);
symbol!(Pred);

/// Prefix of the variables produced by [`fresh_var`](super::fresh_var).
pub const RESERVED_PREFIX: char = 'z';

impl Var {
    /// The `index`-th variable of the reserved namespace (`z0`, `z1`, ...).
    pub fn reserved(index: usize) -> Var {
        Var::new(format!("{RESERVED_PREFIX}{index}"))
    }

    /// Whether the surface grammar refuses this identifier (`z` followed by digits).
    pub fn is_reserved(&self) -> bool {
        self.0
            .strip_prefix(RESERVED_PREFIX)
            .is_some_and(|rest| !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()))
    }

    /// Index of this variable in the reserved namespace, if it belongs to it.
    pub fn reserved_index(&self) -> Option<usize> {
        let rest = self.0.strip_prefix(RESERVED_PREFIX)?;
        if rest.is_empty() || !rest.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        if rest.len() > 1 && rest.starts_with('0') {
            return None;
        }
        rest.parse().ok()
    }
}

/// Event identifiers. Composed event models use literal pairs.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EventId {
    Atom(Arc<str>),
    Pair(Arc<EventId>, Arc<EventId>),
}

impl EventId {
    pub fn new(s: impl AsRef<str>) -> Self {
        EventId::Atom(Arc::from(s.as_ref()))
    }

    pub fn pair(a: EventId, b: EventId) -> Self {
        EventId::Pair(Arc::new(a), Arc::new(b))
    }
}

impl From<&str> for EventId {
    fn from(s: &str) -> Self {
        EventId::new(s)
    }
}

impl fmt::Display for EventId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EventId::Atom(s) => f.write_str(s),
            EventId::Pair(a, b) => write!(f, "({a},{b})"),
        }
    }
}

impl fmt::Debug for EventId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "EventId({self})")
    }
}
