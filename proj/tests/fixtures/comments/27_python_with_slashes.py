x = 7 // 2  # floor division
/* not a comment */
