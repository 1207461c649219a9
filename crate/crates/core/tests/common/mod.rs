//! Shared fixtures: five reference tasks with their randomly generated
//! ground-truth program, the synthesizer's shorter correct prediction(s),
//! and five input-output pairs each. These are the interpreter's external
//! oracle: every program must reproduce every listed pair exactly.

#![allow(dead_code)]

pub struct ReferenceRow {
    pub ground_truth: &'static str,
    pub predicted: &'static [&'static str],
    pub pairs: &'static [([i64; 5], [i64; 5])],
}

pub const REFERENCE_ROWS: &[ReferenceRow] = &[
    ReferenceRow {
        ground_truth: "int * func_1(int a[])
{
    int p_0 = 4;
    int l_7 = 2;
    int l_8 = 4;
    a[l_7] = 3;
    a[l_8] = a[p_0];
    return a;
}
",
        predicted: &["int * func_1(int a[])
{
    int p_0 = 2;
    a[p_0] = 3;
    return a;
}
"],
        pairs: &[
            ([2, 4, 1, 2, -3], [2, 4, 3, 2, -3]),
            ([1, 0, 1, -3, 4], [1, 0, 3, -3, 4]),
            ([2, 2, -4, 2, 0], [2, 2, 3, 2, 0]),
            ([0, -2, 3, 1, 3], [0, -2, 3, 1, 3]),
            ([-2, 1, 4, 0, 0], [-2, 1, 3, 0, 0]),
        ],
    },
    ReferenceRow {
        ground_truth: "int * func_1(int a[])
{
    int p_0 = 2;
    int l_10 = 0;
    int l_1 = 4;
    l_10 = 2;
    for (p_0 = 2; p_0 >= 1; p_0--)
    {
        a[p_0] = 3;
        a[p_0] = 2;
        if (a[p_0])
            break;
        a[p_0] = a[l_1];
        a[p_0]++;
    }
    return a;
}
",
        predicted: &[
            "int * func_1(int a[])
{
    int p_0 = 2;
    int l_7 = 2;
    a[l_7] = 2;
    return a;
}
",
            "int * func_1(int a[])
{
    int p_0 = 2;
    a[p_0] = 2;
    return a;
}
",
        ],
        pairs: &[
            ([3, 1, 3, -2, -4], [3, 1, 2, -2, -4]),
            ([2, 0, -1, -1, 3], [2, 0, 2, -1, 3]),
            ([2, 0, -1, 4, 0], [2, 0, 2, 4, 0]),
            ([-2, -1, 3, 2, -4], [-2, -1, 2, 2, -4]),
            ([-4, 0, 3, 0, 1], [-4, 0, 2, 0, 1]),
        ],
    },
    ReferenceRow {
        ground_truth: "int * func_1(int a[])
{
    int p_0 = 0;
    int l_10 = 3;
    for (p_0 = 4; p_0 >= 0; p_0--)
    {
        a[p_0] = 3;
        a[p_0] = a[p_0];
        a[p_0] = 1;
        if (a[p_0])
            break;
    }
    a[l_10] = a[l_10];
    a[l_10] = a[p_0];
    return a;
}
",
        predicted: &["int * func_1(int a[])
{
    int p_0 = 4;
    for (p_0 = 3; p_0 <= 4; p_0++)
    {
        a[p_0] = 1;
    }
    return a;
}
"],
        pairs: &[
            ([0, 4, 0, 4, 2], [0, 4, 0, 1, 1]),
            ([4, 0, 1, 1, 4], [4, 0, 1, 1, 1]),
            ([3, 2, 3, 0, 0], [3, 2, 3, 1, 1]),
            ([1, 1, 4, 0, 4], [1, 1, 4, 1, 1]),
            ([1, 3, 0, 1, 1], [1, 3, 0, 1, 1]),
        ],
    },
    ReferenceRow {
        ground_truth: "int * func_1(int a[])
{
    int p_0 = 0;
    int l_11 = 3;
    for (p_0 = 2; p_0 >= 1; p_0--)
    {
        for (int p_1 = 4; p_1 >= 3; p_1--)
        {
            a[p_1] = 4;
        }
    }
    a[p_0] = a[l_11];
    return a;
}
",
        predicted: &["int * func_1(int a[])
{
    int p_0 = 3;
    int l_7 = 0;
    a[l_7] = 4;
    for (p_0 = 4; p_0 >= 3; p_0--)
    {
        a[p_0] = 4;
    }
    return a;
}
"],
        pairs: &[
            ([0, 3, -1, 0, 0], [4, 3, -1, 4, 4]),
            ([4, -3, 3, 4, 2], [4, -3, 3, 4, 4]),
            ([-4, 1, 0, 4, -2], [4, 1, 0, 4, 4]),
            ([0, 4, 3, 0, 4], [4, 4, 3, 4, 4]),
            ([2, 2, 0, 3, 2], [4, 2, 0, 4, 4]),
        ],
    },
    ReferenceRow {
        ground_truth: "int * func_1(int a[])
{
    int p_0 = 4;
    for (p_0 = 1; p_0 >= 0; p_0--)
    {
        a[p_0] = 1;
        for (int p_1 = 2; p_1 >= 1; p_1--)
        {
            a[p_1] = 4;
            a[p_1] = a[p_0];
            if (a[p_1])
                break;
        }
    }
    return a;
}
",
        predicted: &["int * func_1(int a[])
{
    int p_0 = 1;
    for (p_0 = 2; p_0 >= 0; p_0--)
    {
        a[p_0] = 1;
    }
    return a;
}
"],
        pairs: &[
            ([1, 0, 0, 4, -3], [1, 1, 1, 4, -3]),
            ([-3, 0, 0, -2, 4], [1, 1, 1, -2, 4]),
            ([0, 2, -2, 4, -3], [1, 1, 1, 4, -3]),
            ([4, -2, 0, -2, 0], [1, 1, 1, -2, 0]),
            ([0, 2, -4, 2, 2], [1, 1, 1, 2, 2]),
        ],
    },
];
