/// `Clone`, `PartialEq`, `Eq` and `Debug` for structs generic over a backend,
/// whose derives would otherwise require `B` itself to implement them.
macro_rules! backend_struct_impls {
    ($name:ident { $($field:ident),+ $(,)? }) => {
        impl<B: $crate::group::Backend> Clone for $name<B> {
            fn clone(&self) -> Self {
                Self { $($field: self.$field.clone()),+ }
            }
        }

        impl<B: $crate::group::Backend> PartialEq for $name<B> {
            fn eq(&self, other: &Self) -> bool {
                true $(&& self.$field == other.$field)+
            }
        }

        impl<B: $crate::group::Backend> Eq for $name<B> {}

        impl<B: $crate::group::Backend> core::fmt::Debug for $name<B> {
            fn fmt(&self, formatter: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
                formatter
                    .debug_struct(stringify!($name))
                    $(.field(stringify!($field), &self.$field))+
                    .finish()
            }
        }
    };
}
